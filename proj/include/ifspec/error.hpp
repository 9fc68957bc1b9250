#ifndef IFSPEC_ERROR_HPP
#define IFSPEC_ERROR_HPP

#include <stdexcept>
#include <string>
#include <utility>

namespace ifspec
{

/// Failure raised by pipeline operations. `code()` is a stable identifier
/// such as `unknown-state` or `unsatisfiable`; `what()` is human readable.
class Error : public std::runtime_error
{
public:
    Error(std::string code, const std::string& message)
        : std::runtime_error(message)
        , code_(std::move(code))
    {
    }

    const std::string& code() const noexcept { return code_; }

private:
    std::string code_;
};

} // namespace ifspec
#endif // IFSPEC_ERROR_HPP
