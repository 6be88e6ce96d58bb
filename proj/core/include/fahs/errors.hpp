#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace fahs {

// Base class for everything thrown by this library.
class error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Input vectors whose lengths must agree do not.
class dimension_error : public error {
public:
    using error::error;
};

// A user-supplied parameter is outside its admissible range.
class config_error : public error {
public:
    using error::error;
};

// A value is outside the mathematical domain of an operation.
class domain_error : public error {
public:
    using error::error;
};

// A numerical fit (IRLS, central matching) failed to produce a usable model.
class fit_error : public error {
public:
    fit_error(const std::string& what, int iterations, double last_change)
        : error(what), iterations(iterations), last_change(last_change) {}
    explicit fit_error(const std::string& what) : error(what) {}

    int iterations = -1;
    double last_change = 0.0;
};

// The Gibbs sampler produced a non-finite draw.
class sampler_error : public error {
public:
    sampler_error(const std::string& what, std::size_t sweep)
        : error(what), sweep(sweep) {}

    std::size_t sweep = 0;
};

// Maximum marginal likelihood estimation failed (quadrature breakdown).
class estimation_error : public error {
public:
    using error::error;
};

// CSV / file input problems; carries a 1-based line number when known.
class io_error : public error {
public:
    explicit io_error(const std::string& what, long line = -1)
        : error(line >= 0 ? what + " (line " + std::to_string(line) + ")" : what),
          line(line) {}

    long line = -1;
};

}  // namespace fahs
