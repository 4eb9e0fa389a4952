#pragma once

#include <iosfwd>
#include <memory>
#include <string>
#include <vector>

// Model data: exchange/diffusion parameters, the niche profile m(x,y) giving
// the growth rate of the reaction f(x,y,v) = m(x,y) v - v^2, and hypothesis
// checks (negative far field, KPP domination, saturation).

namespace roadfield {

struct Parameters {
  double D = 1.0;   // road diffusivity
  double d = 1.0;   // field diffusivity
  double mu = 1.0;  // road -> field deposition rate
  double nu = 1.0;  // field -> road uptake rate
  double c = 0.0;   // frame speed (advection +c d/dx in the moving frame)
  // The standing regime keeps both exchange rates strictly positive; clearing
  // this flag permits mu == 0 or nu == 0, which severs the road-field
  // coupling and is meaningful only as a decoupling diagnostic.
  bool strict_exchange = true;

  // Throws ConfigError on non-finite or sign-invalid entries.
  void validate() const;
};

// chi(r) = -tanh(r): the reference sigmoid used by radial profiles.
double chi(double r) noexcept;

enum class NicheKind { RadialFL, Constant, Tabulated };

// Growth-rate profile m(x,y), defined on the closed half-plane y >= 0.
// Value type; copies are cheap (shared immutable state).
class NicheProfile {
 public:
  // m(x,y) = chi(|(x,y)| - L): favorable disk of radius L (when L > 0),
  // hostile far field approaching -1.
  static NicheProfile radial_fl(double L);

  // m == m0 everywhere.  m0 >= 0 only with the explicit homogeneous flag
  // (such profiles violate the negative-far-field hypothesis by design).
  static NicheProfile constant(double m0, bool homogeneous = false);

  // Bilinear interpolation of samples on a rectangular lattice.  xs and ys
  // strictly increasing; values indexed values[iy * xs.size() + ix].
  // With clamp (the default) evaluation outside the bounding box uses the
  // nearest edge point; every edge sample must then be < 0.  Without clamp,
  // evaluation outside the box throws.
  static NicheProfile tabulated(std::vector<double> xs, std::vector<double> ys,
                                std::vector<double> values, bool clamp = true);

  // CSV with header "x,y,m", one sample per line, lattice in any row order.
  static NicheProfile tabulated_from_csv(std::istream& in, bool clamp = true);
  static NicheProfile tabulated_from_csv_file(const std::string& path,
                                              bool clamp = true);

  double operator()(double x, double y) const;

  double sup() const;                          // sup over the half-plane
  double far_field_bound(double radius) const; // sup over |(x,y)| >= radius
  bool homogeneous() const;
  NicheKind kind() const;
  // Identity token of the shared immutable state: equal tokens mean the same
  // profile.  Valid for caching as long as one copy is kept alive.
  const void* identity() const noexcept;
  // Niche extent: L for RadialFL, largest |corner| of the lattice for
  // Tabulated, 0 for Constant.  Used to size validation radii and domains.
  double extent() const;

 private:
  struct Impl;
  explicit NicheProfile(std::shared_ptr<const Impl> impl);
  std::shared_ptr<const Impl> impl_;
};

// f(x,y,v) = m(x,y) v - v^2 with saturation level S = max(sup m, 0) + 1:
// f(x,y,S) <= -S < 0 everywhere.
struct ReactionTerm {
  NicheProfile profile;

  double value(double x, double y, double v) const;
  double linearization(double x, double y) const;  // d/dv f at v = 0 == m
  double saturation() const;
};

struct HypothesisReport {
  double radius = 0.0;
  double far_field_bound = 0.0;  // sup of m outside the radius
  double sup_m = 0.0;
  double saturation = 0.0;
  bool bfz_ok = false;         // bounded favorable zone: far_field_bound < 0
  bool kpp_ok = false;         // f(v) <= m v on sampled points
  bool saturation_ok = false;  // f(S) <= 0 on sampled points

  bool ok() const { return bfz_ok && kpp_ok && saturation_ok; }
};

// Samples the hypotheses over [-radius, radius] x [0, radius] and the far
// field.  Purely diagnostic: never throws on violation.
HypothesisReport validate_hypotheses(const ReactionTerm& term, double radius);

// Radius that comfortably encloses the favorable set: max(10, extent + 3).
double default_validation_radius(const NicheProfile& profile);

}  // namespace roadfield
