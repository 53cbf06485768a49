#include "smx/field.hpp"

#include <cmath>

#include "smx/errors.hpp"

namespace smx {

SampleVec AnalyticScoreField::score_input_grad(const SampleVec& x,
                                               const SampleVec& cotangent) const {
  if (cotangent.size() != x.size())
    throw SchemaError("score_input_grad: cotangent dimension mismatch");
  // J is the log-density Hessian, hence symmetric: J^T c = J c, computed as
  // the directional derivative of the score along c.
  double norm = 0.0;
  for (double v : cotangent) norm += v * v;
  norm = std::sqrt(norm);
  const int d = dimension();
  if (norm == 0.0) return SampleVec(d, 0.0);
  SampleVec xp(x), xm(x);
  for (int i = 0; i < d; ++i) {
    const double step = fd_step_ * cotangent[i] / norm;
    xp[i] += step;
    xm[i] -= step;
  }
  const SampleVec sp = gmm_.analytic_score(xp);
  const SampleVec sm = gmm_.analytic_score(xm);
  SampleVec out(d);
  for (int i = 0; i < d; ++i)
    out[i] = norm * (sp[i] - sm[i]) / (2.0 * fd_step_);
  return out;
}

}  // namespace smx
