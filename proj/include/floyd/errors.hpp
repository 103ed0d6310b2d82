// Error types shared across the library.
#ifndef FLOYD_ERRORS_HPP_
#define FLOYD_ERRORS_HPP_

#include <stdexcept>
#include <string>

namespace floyd {

struct Error : std::runtime_error {
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// Input text could not be parsed. Carries file, line and offending token.
struct ParseError : Error {
    ParseError(std::string file_, int line_, std::string token_, const std::string& msg)
        : Error(file_ + ":" + std::to_string(line_) + ": " + msg +
                (token_.empty() ? "" : " (at '" + token_ + "')")),
          file(std::move(file_)), line(line_), token(std::move(token_)) {}
    std::string file;
    int line;
    std::string token;
};

// A grammar or automaton violates a structural invariant.
struct ValidationError : Error { using Error::Error; };

struct UnknownNonterminal : Error { using Error::Error; };
struct EmptyString : Error { using Error::Error; };
struct NotOperatorForm : Error { using Error::Error; };
struct NotFloyd : Error { using Error::Error; };
struct NotVpMatrix : Error { using Error::Error; };
struct ConflictingMatrix : Error { using Error::Error; };
struct UnpairedAlphabet : Error { using Error::Error; };
struct BudgetExceeded : Error { using Error::Error; };

}  // namespace floyd

#endif  // FLOYD_ERRORS_HPP_
