#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace logitdyn {

/// Base class for every error raised by the library.
class error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class invalid_profile : public error {
public:
    using error::error;
};

class invalid_parameters : public error {
public:
    using error::error;
};

/// Raised when a state space, matrix or pair space exceeds its configured cap.
class capacity_error : public error {
public:
    using error::error;
};

class missing_potential : public error {
public:
    using error::error;
};

class numerical_error : public error {
public:
    using error::error;
};

class reversibility_error : public error {
public:
    using error::error;
};

class invalid_set : public error {
public:
    using error::error;
};

class unsupported_game : public error {
public:
    using error::error;
};

class dimension_error : public error {
public:
    using error::error;
};

/// Mixing-time search ran past its horizon. Carries the last evaluated point.
class horizon_error : public error {
public:
    horizon_error(const std::string& what, std::uint64_t last_t, double last_d)
        : error(what), last_t_(last_t), last_d_(last_d) {}

    std::uint64_t last_t() const noexcept { return last_t_; }
    double last_d() const noexcept { return last_d_; }

private:
    std::uint64_t last_t_;
    double last_d_;
};

class config_error : public error {
public:
    using error::error;
};

}  // namespace logitdyn
