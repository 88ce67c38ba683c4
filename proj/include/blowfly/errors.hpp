#pragma once

#include <stdexcept>
#include <string>

namespace blowfly {

/// Base of every error raised by the library. The message is prefixed with
/// the module and operation that failed, e.g. "[steady-state/solve] ...".
class Error : public std::runtime_error {
public:
    Error(std::string module, std::string operation, const std::string& detail)
        : std::runtime_error("[" + module + "/" + operation + "] " + detail),
          module_(std::move(module)),
          operation_(std::move(operation)),
          detail_(detail) {}

    const std::string& module() const noexcept { return module_; }
    const std::string& operation() const noexcept { return operation_; }
    const std::string& detail() const noexcept { return detail_; }

private:
    std::string module_;
    std::string operation_;
    std::string detail_;
};

/// Violated input contract (bad length, nonpositive sample, c0 out of range).
class PreconditionError : public Error {
public:
    using Error::Error;
};

/// Malformed run configuration or coefficient text.
class ConfigError : public Error {
public:
    using Error::Error;
};

/// Family of numerical failures that map to CLI exit code 2.
class SolverError : public Error {
public:
    using Error::Error;
};

class ConvergenceError : public SolverError {
public:
    ConvergenceError(std::string module, std::string operation, const std::string& detail,
                     double last_residual)
        : SolverError(std::move(module), std::move(operation), detail),
          last_residual_(last_residual) {}

    double last_residual() const noexcept { return last_residual_; }

private:
    double last_residual_;
};

/// c0 <= 2: the steady state has no Hopf point in the small-r regime.
class NoHopfError : public SolverError {
public:
    NoHopfError(std::string operation, double c0);

    double c0() const noexcept { return c0_; }

private:
    double c0_;
};

class ContinuationStall : public SolverError {
public:
    ContinuationStall(std::string operation, const std::string& detail, double last_good_r)
        : SolverError("hopf-spectrum", std::move(operation), detail),
          last_good_r_(last_good_r) {}

    double last_good_r() const noexcept { return last_good_r_; }

private:
    double last_good_r_;
};

/// Neumann Poisson problem with a right-hand side outside the range of the Laplacian.
class SolvabilityError : public SolverError {
public:
    using SolverError::SolverError;
};

/// Resolvent of the characteristic operator is numerically singular.
class ResonanceError : public SolverError {
public:
    using SolverError::SolverError;
};

/// Simulation left the admissible range (NaN, > 1e8, or nonpositive). Exit code 3.
class BlowUpError : public Error {
public:
    BlowUpError(std::string operation, const std::string& detail, double time)
        : Error("simulator", std::move(operation), detail), time_(time) {}

    double time() const noexcept { return time_; }

private:
    double time_;
};

}  // namespace blowfly
