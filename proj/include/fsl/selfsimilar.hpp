#pragma once

#include <string>
#include <vector>

#include "fsl/error.hpp"
#include "fsl/evolve.hpp"

namespace fsl {

struct ProfileOptions {
  /// Steady tolerance per unit sup |U|.
  double tolerance = 1e-8;
  double s_max = 40.0;
  /// Distance in s between convergence checks; also the span of the
  /// ||U(s + 1) - U(s)|| test.
  double check_interval = 1.0;
  SimilarityOptions similarity;
};

struct ResidualRecord {
  double s;
  double residual;
  double change;
  /// Sign changes of dU/dy (n = 1), -1 otherwise.
  int sign_changes;
};

/// compute_profile did not reach the steady tolerance before s_max.
class NonConvergence : public Error {
 public:
  NonConvergence(const std::string& what, std::vector<ResidualRecord> history)
      : Error(what), history_(std::move(history)) {}
  const std::vector<ResidualRecord>& history() const { return history_; }

 private:
  std::vector<ResidualRecord> history_;
};

/// Steady state of the similarity equation, stored as u^SS(., 1): the
/// background is the Poisson extension of h at scale 1 and time is 1.
struct SelfSimilarProfile {
  Field profile;
  FarFieldProfile h;
  std::string flux_name;
  double residual = 0.0;
  double change = 0.0;
  double s_final = 0.0;
  /// Size of the errors from truncating the box: largest perturbation in
  /// the outer annulus, plus the steady tolerance.
  double truncation = 0.0;
  bool monotone = false;
  int sign_changes = -1;
  std::vector<ResidualRecord> history;

  /// u^SS(., t) = U(./t) on the profile grid.
  Field at_time(double t) const;
  /// U(y) by band-limited interpolation of the perturbation (n = 1).
  double value(double y) const;
};

SelfSimilarProfile compute_profile(const FarFieldProfile& h, const FluxFunction& f, const SchemeConfig& cfg,
                                   const Grid& grid, const ProfileOptions& options = {});

/// Number of sign changes of the discrete derivative of a 1D field, ignoring
/// increments below `floor`.
int derivative_sign_changes(const Field& u, double floor);

struct TailFit {
  double slope = 0.0;
  double amplitude = 0.0;
  /// Root mean square of the log-log fit residual.
  double residual = 0.0;
  /// max / min of |U - h| <y> over the window.
  double ratio = 0.0;
  /// Separate fits on y < 0 and y > 0 (n = 1).
  double slope_negative = 0.0;
  double slope_positive = 0.0;
  std::size_t points = 0;
};

/// Least-squares fit of log |U - h(y/|y|)| against log |y| over
/// r1 <= |y| <= r2.
TailFit fit_tail(const SelfSimilarProfile& profile, double r1, double r2);

struct InvarianceDefect {
  double defect;
  double tolerance;
};

/// Evolves the profile in the similarity frame from t = 1 to t = lambda,
/// rescales the slice by lambda and compares with U where the rescaled box
/// covers the grid. The tolerance is the interpolation tolerance of U.
InvarianceDefect rescale_defect(const SelfSimilarProfile& profile, const FluxFunction& f, const SchemeConfig& cfg,
                                double lambda);

/// One physical step of length dt from U at t = 1 compared with U(./(1 + dt)).
double steady_step_defect(const SelfSimilarProfile& profile, const FluxFunction& f, const SchemeConfig& cfg,
                          double dt);

/// The key = value text written next to an exported profile.
std::string profile_summary(const SelfSimilarProfile& profile, const TailFit* tail = nullptr);
/// Writes <base>.fsl (snapshot) and <base>.txt (key = value report).
void export_profile(const SelfSimilarProfile& profile, const std::string& base, const TailFit* tail = nullptr);

}  // namespace fsl
