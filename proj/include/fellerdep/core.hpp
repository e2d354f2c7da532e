#pragma once

#include <Eigen/Dense>

#include <stdexcept>
#include <string>

namespace fellerdep
{
using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

class Error : public std::runtime_error
{
  public:
    using std::runtime_error::runtime_error;
};

/// A quadrature did not reach its tolerance. Never swallowed.
class QuadratureError : public Error
{
  public:
    QuadratureError(const std::string& what, double estimate, double error_estimate)
        : Error(what), estimate_(estimate), error_estimate_(error_estimate)
    {
    }
    double estimate() const { return estimate_; }
    double error_estimate() const { return error_estimate_; }

  private:
    double estimate_;
    double error_estimate_;
};

/// Invalid or unsupported process/triplet specification.
class SpecError : public Error
{
  public:
    using Error::Error;
};

/// An operation was called outside its documented domain.
class PreconditionError : public Error
{
  public:
    using Error::Error;
};

/// Value plus an absolute error estimate (quadrature or sampling).
template<class T>
struct Estimate
{
    T value{};
    double error = 0.0;
};

struct QuadOptions
{
    double abs_tol = 1e-10;
    double rel_tol = 0.0;
    int max_subdivisions = 4000;
};

}  // namespace fellerdep
