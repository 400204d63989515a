#pragma once

// Shared scalar/matrix aliases, error types and tolerance bundle.

#include <complex>
#include <cstdint>
#include <exception>
#include <mutex>
#include <thread>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace prymtau {

using cplx = std::complex<double>;
using CVec = Eigen::VectorXcd;
using CMat = Eigen::MatrixXcd;
using RVec = Eigen::VectorXd;
using RMat = Eigen::MatrixXd;
using IMat = Eigen::Matrix<std::int64_t, Eigen::Dynamic, Eigen::Dynamic>;
using IVec = Eigen::Matrix<std::int64_t, Eigen::Dynamic, 1>;

inline constexpr double pi = std::numbers::pi;
inline const cplx I{0.0, 1.0};

/// Base class for every error raised by the library.  `code()` is a short
/// machine-readable tag (e.g. "DegenerateCurve") used in CLI failure lists.
class Error : public std::runtime_error {
public:
  Error(std::string code, const std::string& what)
      : std::runtime_error(code + ": " + what), code_(std::move(code)) {}
  const std::string& code() const noexcept { return code_; }

private:
  std::string code_;
};

#define PRYMTAU_DEFINE_ERROR(Name)                                        \
  struct Name : Error {                                                   \
    explicit Name(const std::string& what) : Error(#Name, what) {}        \
  };

PRYMTAU_DEFINE_ERROR(DegenerateCurve)
PRYMTAU_DEFINE_ERROR(WrongDegree)
PRYMTAU_DEFINE_ERROR(OutsideChart)
PRYMTAU_DEFINE_ERROR(NonSimpleStratum)
PRYMTAU_DEFINE_ERROR(RankMismatch)
PRYMTAU_DEFINE_ERROR(SizeMismatch)
PRYMTAU_DEFINE_ERROR(SheetTrackingFailure)
PRYMTAU_DEFINE_ERROR(RankDeficient)
PRYMTAU_DEFINE_ERROR(NonPeriodic)
PRYMTAU_DEFINE_ERROR(DimensionMismatch)
PRYMTAU_DEFINE_ERROR(ToleranceNotMet)
PRYMTAU_DEFINE_ERROR(SheetJump)
PRYMTAU_DEFINE_ERROR(NotPositiveDefinite)
PRYMTAU_DEFINE_ERROR(VanishingTestFailed)
PRYMTAU_DEFINE_ERROR(SingularOddCharacteristic)
PRYMTAU_DEFINE_ERROR(BranchInconsistency)
PRYMTAU_DEFINE_ERROR(DeformationSolveFailed)
PRYMTAU_DEFINE_ERROR(GridTooCoarse)
PRYMTAU_DEFINE_ERROR(InconclusiveFit)
PRYMTAU_DEFINE_ERROR(CycleTrackingLost)
PRYMTAU_DEFINE_ERROR(FrameDegenerationUnresolved)
PRYMTAU_DEFINE_ERROR(ConfigError)

#undef PRYMTAU_DEFINE_ERROR

/// Numerical tolerances.  Defaults follow the accuracy classes used
/// throughout: exact algebra, series identities, quadrature.
struct Tolerances {
  double algebraic = 1e-12;
  double series = 1e-8;
  double quadrature = 1e-12;
  double root_separation = 1e-9;
  double integer_snap = 1e-6;
  double rank = 1e-8;
};

inline double rel_err(cplx a, cplx b) {
  const double s = std::max(std::abs(a), std::abs(b));
  return s == 0.0 ? 0.0 : std::abs(a - b) / s;
}

/// Calls f(i) for i in [0, count) on up to `jobs` threads; the first exception is rethrown.
template <class F>
void parallel_for(std::size_t count, int jobs, F&& f) {
  if (jobs <= 1 || count <= 1) {
    for (std::size_t i = 0; i < count; ++i) f(i);
    return;
  }
  std::exception_ptr err;
  std::mutex mu;
  std::vector<std::thread> pool;
  const std::size_t J = std::min<std::size_t>(jobs, count);
  for (std::size_t t = 0; t < J; ++t)
    pool.emplace_back([&, t] {
      for (std::size_t i = t; i < count; i += J) {
        try {
          f(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(mu);
          if (!err) err = std::current_exception();
        }
      }
    });
  for (auto& th : pool) th.join();
  if (err) std::rethrow_exception(err);
}

}  // namespace prymtau
