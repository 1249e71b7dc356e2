#pragma once

#include <stdexcept>
#include <string>

namespace kachanov {

/// Base class for all library errors.
struct Error : std::runtime_error {
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

struct MalformedFile : Error { using Error::Error; };
struct UnknownTag : Error { using Error::Error; };
struct NonPlanar : Error { using Error::Error; };
struct IoError : Error { using Error::Error; };
struct IndexOutOfRange : Error { using Error::Error; };
struct DegenerateTriangle : Error { using Error::Error; };
struct ZeroDiagonal : Error { using Error::Error; };
struct ConfigError : Error { using Error::Error; };

/// A convergence study requires every level to finish; thrown when one halts.
struct DegenerateRun : Error { using Error::Error; };

struct NoConvergence : Error {
    int iterations;
    double residual;
    NoConvergence(int iters, double res)
        : Error("cg: no convergence after " + std::to_string(iters) +
                " iterations, relative residual " + std::to_string(res)),
          iterations(iters),
          residual(res) {}
};

}  // namespace kachanov
