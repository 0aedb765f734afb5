#include "riemlap/types.hpp"

namespace riemlap {

Eigen::LLT<Mat> chol_spd(const Mat& a, const std::string& context) {
  Eigen::LLT<Mat> llt(a);
  if (llt.info() == Eigen::Success) return llt;
  const double jitter = 1e-9 * a.diagonal().mean();
  Mat aj = a;
  aj.diagonal().array() += jitter;
  llt.compute(aj);
  if (llt.info() == Eigen::Success) return llt;
  throw SpdError(context + ": matrix is not positive definite (Cholesky failed)");
}

double log_det_spd(const Eigen::LLT<Mat>& llt) {
  return 2.0 * llt.matrixLLT().diagonal().array().log().sum();
}

}  // namespace riemlap
