#pragma once

// Reference values produced by independent oracles and frozen here:
// tests/oracles/oracles.py (sympy prime counting and factorisation, mpmath
// Euler products summed as logarithms over primes up to 10^6 plus the
// prime-zeta tail), and published values that the library must reproduce.

#include <cstdint>
#include <utility>
#include <vector>

namespace moddiv::oracle {

// sympy.primepi(10544111).
inline constexpr std::uint64_t kPrimeCountX0 = 698306;
// Square-full numbers <= 5.5e10 and <= 1e5 (direct a^2 b^3 enumeration).
inline constexpr std::uint64_t kSquarefullCount55e9 = 504007;
inline constexpr std::uint64_t kSquarefullCount1e5 = 618;

// Published list of square-full e-infinitary perfect numbers up to 6e10.
inline const std::vector<std::uint64_t> kPublishedPerfect = {36,        1800,      2700,       4769856,
                                                             238492800, 357739200, 54531590400};
// Published 40-digit example and its sympy.factorint factorisation.
inline constexpr const char* kBigPerfect = "1307484087615221689700651798824550400000";
inline const std::vector<std::pair<std::uint64_t, unsigned>> kBigPerfectFactors = {
    {2, 19}, {3, 2}, {5, 5}, {7, 2}, {11, 2}, {13, 2}, {19, 2}, {37, 2}, {79, 2}, {109, 2}, {157, 2}, {313, 2}};

// mpmath, 40 digits.
inline constexpr const char* kZeta3 = "1.202056903159594285399738161511449990765";
inline constexpr const char* kMertensB = "0.2614972128476427837554268386086958590516";
inline constexpr const char* kPrimeZeta2 = "0.4522474200410654985065433648322479341732";
inline constexpr const char* kZeta4Over2Zeta3 = "0.4501963388198439826891210384261909144433";

// Euler products from the oracle; digits kept only to the oracle's accuracy.
inline constexpr const char* kHEsigma = "0.9100839933896";
inline constexpr const char* kC1Esigma = "2.960080302024";
inline constexpr const char* kAEtauInf = "1.548212582846";
inline constexpr const char* kD1TauInf = "0.7332505538907";
inline constexpr double kCFrakDouble = 0.43802998037163511;  // primes > 10^6 omitted: ~1e-13

// Explicit-bound constants (mpmath from the closed forms).
inline constexpr const char* kC1Proof = "0.7251328793174813146289";
inline constexpr const char* kC2Proof = "0.7695551362634877385991525";
inline constexpr const char* kProofRatio = "0.9938913636424897081072885";

// log10 of the optimizer objectives (exact integers, mpmath log10).
inline constexpr double kLog10Base = 801.92922169301722;
inline constexpr double kLog10Refined = 823.49121552898317;
inline constexpr double kCaseBIncrement = 14.201738323326257;

}  // namespace moddiv::oracle
