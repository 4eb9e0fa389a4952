#include "roadfield/model.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <limits>
#include <map>
#include <sstream>

#include "roadfield/util.hpp"

namespace roadfield {

void Parameters::validate() const {
  auto bad = [](const std::string& what) { throw ConfigError("parameters: " + what); };
  for (double v : {D, d, mu, nu, c})
    if (!std::isfinite(v)) bad("non-finite entry");
  if (D <= 0.0) bad("D must be > 0");
  if (d <= 0.0) bad("d must be > 0");
  if (mu < 0.0) bad("mu must be >= 0");
  if (nu < 0.0) bad("nu must be >= 0");
  if ((mu == 0.0 || nu == 0.0) && strict_exchange)
    bad("mu == 0 or nu == 0 decouples road and field; "
        "clear strict_exchange to run this diagnostic");
}

double chi(double r) noexcept { return -std::tanh(r); }

struct NicheProfile::Impl {
  NicheKind kind = NicheKind::Constant;
  bool homogeneous = false;
  double L = 0.0;   // RadialFL
  double m0 = 0.0;  // Constant
  // Tabulated
  bool clamp = true;
  std::vector<double> xs, ys, vals;
  double sup_cached = 0.0;
};

NicheProfile::NicheProfile(std::shared_ptr<const Impl> impl)
    : impl_(std::move(impl)) {}

NicheProfile NicheProfile::radial_fl(double L) {
  if (!std::isfinite(L)) throw ConfigError("niche: L must be finite");
  auto impl = std::make_shared<Impl>();
  impl->kind = NicheKind::RadialFL;
  impl->L = L;
  impl->sup_cached = chi(-L);  // attained at the origin
  return NicheProfile(std::move(impl));
}

NicheProfile NicheProfile::constant(double m0, bool homogeneous) {
  if (!std::isfinite(m0)) throw ConfigError("niche: m0 must be finite");
  if (m0 >= 0.0 && !homogeneous)
    throw ConfigError(
        "niche: constant profile with m0 >= 0 has no hostile far field; "
        "pass the homogeneous flag to use it anyway");
  auto impl = std::make_shared<Impl>();
  impl->kind = NicheKind::Constant;
  impl->m0 = m0;
  impl->homogeneous = homogeneous;
  impl->sup_cached = m0;
  return NicheProfile(std::move(impl));
}

NicheProfile NicheProfile::tabulated(std::vector<double> xs,
                                     std::vector<double> ys,
                                     std::vector<double> values, bool clamp) {
  if (xs.size() < 2 || ys.size() < 2)
    throw ConfigError("niche: tabulated lattice needs at least 2x2 samples");
  if (values.size() != xs.size() * ys.size())
    throw ConfigError("niche: tabulated values size mismatch");
  for (std::size_t i = 1; i < xs.size(); ++i)
    if (!(xs[i] > xs[i - 1]))
      throw ConfigError("niche: tabulated xs must be strictly increasing");
  for (std::size_t j = 1; j < ys.size(); ++j)
    if (!(ys[j] > ys[j - 1]))
      throw ConfigError("niche: tabulated ys must be strictly increasing");
  for (double v : values)
    if (!std::isfinite(v)) throw ConfigError("niche: non-finite sample");
  const std::size_t nx = xs.size(), ny = ys.size();
  if (clamp) {
    // Clamped evaluation extends edge values to infinity; they must keep the
    // far field hostile.
    for (std::size_t i = 0; i < nx; ++i)
      if (values[i] >= 0.0 || values[(ny - 1) * nx + i] >= 0.0)
        throw ConfigError("niche: clamped tabulated profile needs edge samples < 0");
    for (std::size_t j = 0; j < ny; ++j)
      if (values[j * nx] >= 0.0 || values[j * nx + nx - 1] >= 0.0)
        throw ConfigError("niche: clamped tabulated profile needs edge samples < 0");
  }
  auto impl = std::make_shared<Impl>();
  impl->kind = NicheKind::Tabulated;
  impl->clamp = clamp;
  impl->sup_cached = *std::max_element(values.begin(), values.end());
  impl->xs = std::move(xs);
  impl->ys = std::move(ys);
  impl->vals = std::move(values);
  return NicheProfile(std::move(impl));
}

NicheProfile NicheProfile::tabulated_from_csv(std::istream& in, bool clamp) {
  std::string line;
  if (!std::getline(in, line)) throw ConfigError("niche csv: empty file");
  auto strip = [](std::string s) {
    s.erase(std::remove_if(s.begin(), s.end(),
                           [](unsigned char ch) { return std::isspace(ch); }),
            s.end());
    return s;
  };
  if (strip(line) != "x,y,m")
    throw ConfigError("niche csv: expected header 'x,y,m', got '" + line + "'");
  std::map<std::pair<double, double>, double> samples;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (strip(line).empty()) continue;
    std::istringstream row(line);
    double x, y, m;
    char c1, c2;
    if (!(row >> x >> c1 >> y >> c2 >> m) || c1 != ',' || c2 != ',')
      throw ConfigError("niche csv: bad row at line " + std::to_string(lineno));
    if (!samples.emplace(std::make_pair(x, y), m).second)
      throw ConfigError("niche csv: duplicate sample at line " + std::to_string(lineno));
  }
  std::vector<double> xs, ys;
  for (const auto& [key, val] : samples) {
    (void)val;
    xs.push_back(key.first);
    ys.push_back(key.second);
  }
  std::sort(xs.begin(), xs.end());
  xs.erase(std::unique(xs.begin(), xs.end()), xs.end());
  std::sort(ys.begin(), ys.end());
  ys.erase(std::unique(ys.begin(), ys.end()), ys.end());
  std::vector<double> vals(xs.size() * ys.size());
  if (samples.size() != vals.size())
    throw ConfigError("niche csv: samples do not fill a rectangular lattice");
  for (std::size_t j = 0; j < ys.size(); ++j)
    for (std::size_t i = 0; i < xs.size(); ++i) {
      auto it = samples.find({xs[i], ys[j]});
      if (it == samples.end())
        throw ConfigError("niche csv: missing lattice sample");
      vals[j * xs.size() + i] = it->second;
    }
  return tabulated(std::move(xs), std::move(ys), std::move(vals), clamp);
}

NicheProfile NicheProfile::tabulated_from_csv_file(const std::string& path,
                                                   bool clamp) {
  std::ifstream in(path);
  if (!in) throw ConfigError("niche csv: cannot open " + path);
  return tabulated_from_csv(in, clamp);
}

double NicheProfile::operator()(double x, double y) const {
  const Impl& im = *impl_;
  switch (im.kind) {
    case NicheKind::RadialFL:
      return chi(std::hypot(x, y) - im.L);
    case NicheKind::Constant:
      return im.m0;
    case NicheKind::Tabulated: {
      const auto& xs = im.xs;
      const auto& ys = im.ys;
      if (!im.clamp &&
          (x < xs.front() || x > xs.back() || y < ys.front() || y > ys.back()))
        throw NumericsError("niche: evaluation outside tabulated box");
      const double cx = std::clamp(x, xs.front(), xs.back());
      const double cy = std::clamp(y, ys.front(), ys.back());
      auto cell = [](const std::vector<double>& g, double v) {
        auto it = std::upper_bound(g.begin(), g.end(), v);
        std::size_t hi = std::clamp<std::size_t>(it - g.begin(), 1, g.size() - 1);
        return hi - 1;
      };
      const std::size_t i = cell(xs, cx), j = cell(ys, cy);
      const double tx = (cx - xs[i]) / (xs[i + 1] - xs[i]);
      const double ty = (cy - ys[j]) / (ys[j + 1] - ys[j]);
      const std::size_t nx = xs.size();
      const double v00 = im.vals[j * nx + i], v10 = im.vals[j * nx + i + 1];
      const double v01 = im.vals[(j + 1) * nx + i], v11 = im.vals[(j + 1) * nx + i + 1];
      return (1 - ty) * ((1 - tx) * v00 + tx * v10) +
             ty * ((1 - tx) * v01 + tx * v11);
    }
  }
  return 0.0;  // unreachable
}

double NicheProfile::sup() const { return impl_->sup_cached; }

double NicheProfile::far_field_bound(double radius) const {
  const Impl& im = *impl_;
  switch (im.kind) {
    case NicheKind::RadialFL:
      // chi(r - L) decreases in r, so the far-field sup sits on the circle.
      return chi(radius - im.L);
    case NicheKind::Constant:
      return im.m0;
    case NicheKind::Tabulated: {
      // Clamped extension attains edge values arbitrarily far out; interior
      // samples beyond the radius also count.
      double b = -std::numeric_limits<double>::infinity();
      const std::size_t nx = im.xs.size(), ny = im.ys.size();
      for (std::size_t j = 0; j < ny; ++j)
        for (std::size_t i = 0; i < nx; ++i) {
          const bool edge = i == 0 || i == nx - 1 || j == 0 || j == ny - 1;
          if (edge || std::hypot(im.xs[i], im.ys[j]) >= radius)
            b = std::max(b, im.vals[j * nx + i]);
        }
      return b;
    }
  }
  return 0.0;  // unreachable
}

bool NicheProfile::homogeneous() const { return impl_->homogeneous; }

NicheKind NicheProfile::kind() const { return impl_->kind; }

const void* NicheProfile::identity() const noexcept { return impl_.get(); }

double NicheProfile::extent() const {
  const Impl& im = *impl_;
  switch (im.kind) {
    case NicheKind::RadialFL:
      return std::max(im.L, 0.0);
    case NicheKind::Constant:
      return 0.0;
    case NicheKind::Tabulated:
      return std::max(std::hypot(im.xs.front(), im.ys.back()),
                      std::hypot(im.xs.back(), im.ys.back()));
  }
  return 0.0;  // unreachable
}

double ReactionTerm::value(double x, double y, double v) const {
  return profile(x, y) * v - v * v;
}

double ReactionTerm::linearization(double x, double y) const {
  return profile(x, y);
}

double ReactionTerm::saturation() const {
  return std::max(profile.sup(), 0.0) + 1.0;
}

HypothesisReport validate_hypotheses(const ReactionTerm& term, double radius) {
  if (!(radius > 0.0)) throw ConfigError("validate_hypotheses: radius must be > 0");
  HypothesisReport rep;
  rep.radius = radius;
  rep.sup_m = term.profile.sup();
  rep.saturation = term.saturation();
  rep.far_field_bound = term.profile.far_field_bound(radius);
  rep.bfz_ok = rep.far_field_bound < 0.0;

  // Sampled structural checks of the reaction itself.
  const int N = 41;
  const double S = rep.saturation;
  bool kpp = true, sat = true;
  for (int i = 0; i < N; ++i)
    for (int j = 0; j < N; ++j) {
      const double x = -radius + 2.0 * radius * i / (N - 1);
      const double y = radius * j / (N - 1);
      const double m = term.profile(x, y);
      for (double v : {0.25 * S, 0.5 * S, S}) {
        if (term.value(x, y, v) > m * v + 1e-12) kpp = false;
      }
      if (term.value(x, y, S) > 0.0) sat = false;
    }
  rep.kpp_ok = kpp;
  rep.saturation_ok = sat;
  return rep;
}

double default_validation_radius(const NicheProfile& profile) {
  return std::max(10.0, profile.extent() + 3.0);
}

}  // namespace roadfield
