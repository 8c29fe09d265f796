#include "moddiv/oeis_client.hpp"

#include <atomic>
#include <cctype>
#include <cstdlib>
#include <fstream>
#include <semaphore>
#include <sstream>

#include <httplib.h>
#include <openssl/evp.h>
#include <unistd.h>

#include "moddiv/error.hpp"
#include "moddiv/multiplicative.hpp"

namespace moddiv {

namespace {

namespace fs = std::filesystem;

std::counting_semaphore<2>& fetch_slots() {
  static std::counting_semaphore<2> slots(2);
  return slots;
}

struct SlotGuard {
  SlotGuard() { fetch_slots().acquire(); }
  ~SlotGuard() { fetch_slots().release(); }
  SlotGuard(const SlotGuard&) = delete;
  SlotGuard& operator=(const SlotGuard&) = delete;
};

std::optional<std::string> read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return std::nullopt;
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_atomic(const fs::path& path, std::string_view bytes) {
  static std::atomic<unsigned> counter{0};
  fs::create_directories(path.parent_path());
  const fs::path tmp = path.string() + ".tmp." + std::to_string(::getpid()) + "." +
                       std::to_string(counter.fetch_add(1));
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw FetchError("cannot write cache file " + tmp.string());
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw FetchError("cannot write cache file " + tmp.string());
  }
  fs::rename(tmp, path);
}

std::optional<std::string> http_get(const std::string& server, const std::string& path,
                                    const FetchOptions& options, std::string& error) {
  httplib::Client client(server);
  client.set_connection_timeout(options.timeout_seconds, 0);
  client.set_read_timeout(options.timeout_seconds, 0);
  client.set_follow_location(true);
  for (unsigned attempt = 0; attempt <= options.retries; ++attempt) {
    auto res = client.Get(path);
    if (res && res->status == 200) return res->body;
    error = res ? "HTTP status " + std::to_string(res->status) : httplib::to_string(res.error());
  }
  return std::nullopt;
}

// Expected digest of `name` from the SHA256SUMS file in `dir`.
std::optional<std::string> pinned_digest(const fs::path& dir, const std::string& name) {
  const auto sums = read_file(dir / "SHA256SUMS");
  if (!sums) return std::nullopt;
  std::istringstream in(*sums);
  std::string digest, file;
  while (in >> digest >> file) {
    if (!file.empty() && file[0] == '*') file.erase(0, 1);
    if (file == name) return digest;
  }
  return std::nullopt;
}

}  // namespace

std::string to_string(BFileSource s) {
  switch (s) {
    case BFileSource::network: return "network";
    case BFileSource::cache: return "cache";
    case BFileSource::bundled: return "bundled";
  }
  return "unknown";
}

void validate_sequence_id(std::string_view id) {
  bool ok = id.size() == 7 && id[0] == 'A';
  for (std::size_t i = 1; ok && i < id.size(); ++i) {
    ok = std::isdigit(static_cast<unsigned char>(id[i])) != 0;
  }
  if (!ok) throw UsageError("invalid OEIS id '" + std::string(id) + "' (expected A + 6 digits)");
}

std::string bfile_name(std::string_view id) {
  validate_sequence_id(id);
  return "b" + std::string(id.substr(1)) + ".txt";
}

BFile parse_bfile(std::string_view text, std::string sequence_id, BFileSource source) {
  validate_sequence_id(sequence_id);
  BFile b;
  b.sequence_id = std::move(sequence_id);
  b.source = source;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t end = std::min(text.find('\n', pos), text.size());
    std::string line(text.substr(pos, end - pos));
    pos = end + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const auto first = line.find_first_not_of(" \t");
    if (first == std::string::npos || line[first] == '#') {
      if (end == text.size()) break;
      continue;
    }
    std::istringstream in(line);
    std::string idx_text, val_text, extra;
    in >> idx_text >> val_text;
    if (val_text.empty() || (in >> extra)) {
      throw ParseError("b-file line must hold exactly 'index value'", line_no);
    }
    std::uint64_t index = 0;
    BigInt value;
    try {
      const bool idx_digits =
          idx_text.find_first_not_of("0123456789") == std::string::npos;
      if (!idx_digits) throw std::invalid_argument("index");
      index = std::stoull(idx_text);
      const std::string_view digits =
          val_text[0] == '-' ? std::string_view(val_text).substr(1) : std::string_view(val_text);
      if (digits.empty() || digits.find_first_not_of("0123456789") != std::string_view::npos) {
        throw std::invalid_argument("value");
      }
      value = BigInt(val_text);
    } catch (const std::exception&) {
      throw ParseError("malformed b-file entry '" + line + "'", line_no);
    }
    if (!b.entries.empty() && index <= b.entries.back().first) {
      throw ParseError("b-file indices must increase strictly", line_no);
    }
    b.entries.emplace_back(index, std::move(value));
    if (end == text.size()) break;
  }
  return b;
}

fs::path default_cache_dir() {
  if (const char* env = std::getenv("MODDIV_CACHE"); env && *env) return env;
  if (const char* xdg = std::getenv("XDG_CACHE_HOME"); xdg && *xdg) return fs::path(xdg) / "moddiv";
  if (const char* home = std::getenv("HOME"); home && *home) {
    return fs::path(home) / ".cache" / "moddiv";
  }
  return fs::temp_directory_path() / "moddiv-cache";
}

fs::path default_bundled_dir() {
  if (const char* env = std::getenv("MODDIV_DATA_DIR"); env && *env) return env;
#ifdef MODDIV_SOURCE_OEIS_DIR
  if (fs::exists(fs::path(MODDIV_SOURCE_OEIS_DIR) / "SHA256SUMS")) return MODDIV_SOURCE_OEIS_DIR;
#endif
#ifdef MODDIV_INSTALL_OEIS_DIR
  return MODDIV_INSTALL_OEIS_DIR;
#else
  return "data/oeis";
#endif
}

BFile fetch_bfile(std::string_view sequence_id, const FetchOptions& options) {
  const std::string id(sequence_id);
  const std::string name = bfile_name(id);
  const fs::path cache = options.cache_dir.value_or(default_cache_dir()) / name;

  if (options.mode == FetchMode::online) {
    std::string error;
    std::optional<std::string> body;
    {
      SlotGuard slot;
      body = http_get(options.server, "/" + id + "/" + name, options, error);
    }
    if (body) {
      BFile b = parse_bfile(*body, id, BFileSource::network);
      write_atomic(cache, *body);
      return b;
    }
    if (const auto cached = read_file(cache)) return parse_bfile(*cached, id, BFileSource::cache);
    throw FetchError("fetching " + id + " from " + options.server + " failed: " + error);
  }

  if (const auto cached = read_file(cache)) return parse_bfile(*cached, id, BFileSource::cache);
  const fs::path dir = options.bundled_dir.value_or(default_bundled_dir());
  const auto bundled = read_file(dir / name);
  if (!bundled) {
    throw FetchError("no cached or bundled b-file for " + id + " (offline; looked in " +
                     cache.parent_path().string() + " and " + dir.string() + ")");
  }
  const auto digest = pinned_digest(dir, name);
  if (!digest) throw ParseError("bundled " + name + " has no SHA256SUMS entry", 0);
  if (*digest != sha256_hex(*bundled)) {
    throw ParseError("bundled " + name + " does not match its pinned checksum", 0);
  }
  return parse_bfile(*bundled, id, BFileSource::bundled);
}

CrossCheckReport cross_check(const BFile& bfile, std::string_view function_id,
                             std::uint64_t count) {
  const MultiplicativeFunction& f = function_by_id(function_id);
  if (count < 1) throw UsageError("cross_check: count must be >= 1");
  if (bfile.entries.empty() || bfile.entries.front().first != 1) {
    throw UsageError("cross_check: " + bfile.sequence_id + " has no entry for index 1");
  }
  if (count > bfile.entries.size() || bfile.entries[count - 1].first != count) {
    throw UsageError("cross_check: " + bfile.sequence_id + " does not cover indices 1.." +
                     std::to_string(count));
  }
  CrossCheckReport r;
  r.sequence_id = bfile.sequence_id;
  r.function_id = f.id();
  r.count = count;
  r.source = bfile.source;
  const Sequence values = values_up_to(f, count);
  for (std::uint64_t n = 1; n <= count; ++n) {
    if (values[n] != bfile.entries[n - 1].second) {
      r.first_mismatch = Mismatch{n, bfile.entries[n - 1].second, values[n]};
      break;
    }
  }
  return r;
}

CrossCheckReport cross_check(std::string_view sequence_id, std::string_view function_id,
                             std::uint64_t count, const FetchOptions& options) {
  function_by_id(function_id);  // validate before any I/O
  return cross_check(fetch_bfile(sequence_id, options), function_id, count);
}

std::string sha256_hex(std::string_view data) {
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), md, &len, EVP_sha256(), nullptr) != 1) {
    throw Error("SHA-256 computation failed");
  }
  static const char* hex = "0123456789abcdef";
  std::string out;
  for (unsigned i = 0; i < len; ++i) {
    out += hex[md[i] >> 4];
    out += hex[md[i] & 15];
  }
  return out;
}

}  // namespace moddiv
