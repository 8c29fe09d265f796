#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "moddiv/arithmetic_core.hpp"

namespace moddiv {

enum class BFileSource { network, cache, bundled };
std::string to_string(BFileSource s);

struct BFile {
  std::string sequence_id;  // "A049419"
  std::vector<std::pair<std::uint64_t, BigInt>> entries;  // strictly increasing indices
  BFileSource source = BFileSource::bundled;
};

// Throws UsageError unless id is 'A' followed by six digits.
void validate_sequence_id(std::string_view id);
// "A049419" -> "b049419.txt"
std::string bfile_name(std::string_view id);

// Whitespace-separated "index value" per line; blank lines and lines whose
// first non-blank character is '#' are ignored. Anything else, or a
// non-increasing index, throws ParseError carrying the 1-based line.
BFile parse_bfile(std::string_view text, std::string sequence_id,
                  BFileSource source = BFileSource::bundled);

enum class FetchMode { online, offline };

struct FetchOptions {
  FetchMode mode = FetchMode::offline;
  // Defaults: $MODDIV_CACHE, else $XDG_CACHE_HOME/moddiv, else ~/.cache/moddiv.
  std::optional<std::filesystem::path> cache_dir;
  // Defaults: $MODDIV_DATA_DIR, else the bundled fixture directory.
  std::optional<std::filesystem::path> bundled_dir;
  // scheme://host[:port]; the b-file lives at /Axxxxxx/bxxxxxx.txt.
  std::string server = "https://oeis.org";
  int timeout_seconds = 20;
  unsigned retries = 1;
};

std::filesystem::path default_cache_dir();
std::filesystem::path default_bundled_dir();

// online: GET with timeout and `retries` extra attempts; on success the
// body is validated, written to the cache (temp file then rename) and
// returned. When the network fails a warm cache is used; a cold cache
// throws FetchError. offline: cache first, then the bundled fixture, whose
// bytes must match its SHA256SUMS entry (ParseError otherwise); neither
// present throws FetchError. At most two fetches run concurrently.
BFile fetch_bfile(std::string_view sequence_id, const FetchOptions& options = {});

struct Mismatch {
  std::uint64_t index = 0;
  BigInt expected;  // b-file value
  BigInt actual;    // our evaluator
};

struct CrossCheckReport {
  std::string sequence_id;
  std::string function_id;
  std::uint64_t count = 0;
  BFileSource source = BFileSource::bundled;
  std::optional<Mismatch> first_mismatch;
  bool matched() const { return !first_mismatch; }
};

// Compares evaluate(function_id, n) with the b-file for n = 1..count.
// Requires entry index 1, contiguous indices up to count, and
// 1 <= count <= available entries (UsageError otherwise).
CrossCheckReport cross_check(const BFile& bfile, std::string_view function_id,
                             std::uint64_t count);
CrossCheckReport cross_check(std::string_view sequence_id, std::string_view function_id,
                             std::uint64_t count, const FetchOptions& options = {});

// Lowercase hex SHA-256 of the bytes.
std::string sha256_hex(std::string_view data);

}  // namespace moddiv
