#ifndef AUTOSTRUCT_ERRORS_HPP
#define AUTOSTRUCT_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace autostruct {

struct AlphabetMismatch : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct EmptyWord : std::invalid_argument {
    EmptyWord() : std::invalid_argument("run counts are defined for non-empty words only") {}
};

struct ZeroPolynomial : std::invalid_argument {
    ZeroPolynomial() : std::invalid_argument("zero polynomial") {}
};

/// Resource-cap failure (determinization blow-up, formula size caps).
struct StateCapExceeded : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct AmbiguousConcat : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Structural validation failure of an input artifact.
struct ValidationError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

}  // namespace autostruct

#endif
