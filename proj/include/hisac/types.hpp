#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace hisac {

using cplx = std::complex<double>;
using CVector = Eigen::VectorXcd;
using CMatrix = Eigen::MatrixXcd;
using RVector = Eigen::VectorXd;
using RMatrix = Eigen::MatrixXd;

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A precondition on an argument was violated.
class InvalidArgument : public Error {
public:
    using Error::Error;
};

/// The numerical solver could not produce a usable answer.
class SolverFailure : public Error {
public:
    using Error::Error;
};

/// A user's channel receives (numerically) no signal power from its covariance.
class DegenerateUser : public Error {
public:
    DegenerateUser(std::size_t user, const std::string& what) : Error(what), user_(user) {}
    std::size_t user() const { return user_; }

private:
    std::size_t user_;
};

/// The communication constraints cannot be met with the given power budget.
class InfeasibleScenario : public Error {
public:
    using Error::Error;
};

inline double to_db(double linear) { return 10.0 * std::log10(linear); }
inline double from_db(double db) { return std::pow(10.0, db / 10.0); }

} // namespace hisac
