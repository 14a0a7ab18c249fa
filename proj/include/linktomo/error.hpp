#pragma once

#include <stdexcept>
#include <string>

namespace linktomo {

/// Error categories, mapped 1:1 onto CLI exit codes.
enum class Errc {
    internal = 1,
    bad_input = 2,
    infeasible = 3,
    size_guard = 4,
};

class Error : public std::runtime_error {
public:
    Error(Errc code, const std::string& what) : std::runtime_error(what), code_(code) {}

    Errc code() const noexcept { return code_; }

private:
    Errc code_;
};

[[noreturn]] inline void fail(Errc code, const std::string& what) { throw Error(code, what); }

} // namespace linktomo
