#include <fmt/format.h>

#include <Eigen/LU>
#include <algorithm>
#include <cmath>
#include <numbers>

#include "nlbvp/errors.hpp"
#include "nlbvp/pencil.hpp"

namespace nlbvp::pencil {
namespace {

struct Sample {
  Complex value;
  double scale;
};
using Evaluator = std::function<Sample(Complex)>;

class ArgumentTracker {
 public:
  ArgumentTracker(const Evaluator& f, const ContourOptions& opt) : f_(f), opt_(opt) {}

  Complex eval(Complex z) {
    const Sample s = f_(z);
    if (!(std::abs(s.value) > opt_.zero_threshold * s.scale)) {
      throw ContourOnZero(fmt::format("determinant vanishes on the contour near ({:.6g}, {:.6g})",
                                      z.real(), z.imag()));
    }
    return s.value;
  }

  double edge(Complex z0, Complex z1) {
    double total = 0.0;
    Complex prev_z = z0;
    Complex prev = eval(z0);
    for (int n = 1; n <= opt_.initial_segments; ++n) {
      const Complex z = z0 + (z1 - z0) * (static_cast<double>(n) / opt_.initial_segments);
      const Complex fz = eval(z);
      total += refine(prev_z, prev, z, fz, 0);
      prev_z = z;
      prev = fz;
    }
    return total;
  }

 private:
  double refine(Complex z0, Complex f0, Complex z1, Complex f1, int depth) {
    const double d = std::arg(f1 / f0);
    if (std::abs(d) <= opt_.max_arg_step) return d;
    if (depth >= opt_.max_depth) {
      throw ContourOnZero(fmt::format("argument jump unresolved near ({:.6g}, {:.6g})",
                                      z0.real(), z0.imag()));
    }
    const Complex zm = 0.5 * (z0 + z1);
    const Complex fm = eval(zm);
    return refine(z0, f0, zm, fm, depth + 1) + refine(zm, fm, z1, f1, depth + 1);
  }

  const Evaluator& f_;
  const ContourOptions& opt_;
};

int rectangle_winding(const Evaluator& f, Complex lo, Complex hi, const ContourOptions& opt) {
  ArgumentTracker tr(f, opt);
  const Complex c1(hi.real(), lo.imag()), c3(lo.real(), hi.imag());
  const double total = tr.edge(lo, c1) + tr.edge(c1, hi) + tr.edge(hi, c3) + tr.edge(c3, lo);
  const double w = total / (2.0 * std::numbers::pi);
  const double k = std::round(w);
  if (std::abs(w - k) > 0.25) {
    throw PrecisionError(fmt::format("non-integer winding {:.4f}", w));
  }
  return static_cast<int>(k);
}

Evaluator model_evaluator(const OrbitModel& model, const ShootingOptions& sh) {
  return [&model, sh](Complex z) {
    const CMatrix m = characteristic_matrix(model, z, sh);
    return Sample{m.partialPivLu().determinant(), hadamard_scale(m)};
  };
}

struct Box {
  Complex lo, hi;
};

// Contour actually used for a band after dilation retries.
struct BandContour {
  Box box;
  int winding = 0;
};

BandContour band_contour(const Evaluator& f, const Band& band, const Window& window,
                         const ContourOptions& opt) {
  double half = 0.5 * (window.re_max - window.re_min);
  const double centre = 0.5 * (window.re_max + window.re_min);
  double top = band.im_max;
  double margin = band.closed_below ? opt.bottom_margin : 0.0;
  double bottom_base = band.im_min;
  for (int attempt = 0;; ++attempt) {
    const Box box{Complex(centre - half, bottom_base - margin), Complex(centre + half, top)};
    try {
      return {box, rectangle_winding(f, box.lo, box.hi, opt)};
    } catch (const ContourOnZero&) {
      if (attempt >= opt.dilation_retries) {
        throw ContourOnZero(fmt::format("zero on contour after {} dilations", attempt));
      }
    }
    half *= 1.01;
    top *= 0.99;
    if (band.closed_below) {
      margin *= 1.01;
    } else {
      bottom_base *= 1.01;
    }
  }
}

struct NewtonResult {
  Complex z;
  bool converged = false;
};

NewtonResult newton(const OrbitModel& model, Complex z, int mult, const ShootingOptions& sh) {
  for (int it = 0; it < 100; ++it) {
    const CMatrix m = characteristic_matrix(model, z, sh);
    const auto lu = m.partialPivLu();
    const Complex det = lu.determinant();
    if (det == 0.0) return {z, true};
    const CMatrix dm = characteristic_matrix_derivative(model, z, sh);
    const Complex tr = lu.solve(dm).trace();
    if (!std::isfinite(std::abs(tr)) || tr == 0.0) return {z, false};
    const Complex step = static_cast<double>(mult) / tr;
    z -= step;
    if (std::abs(step) <= 1e-15 * std::max(1.0, std::abs(z))) return {z, true};
    if (std::abs(z) > 1e6) return {z, false};
  }
  return {z, false};
}

bool inside(const Box& b, Complex z, double pad) {
  return z.real() >= b.lo.real() - pad && z.real() <= b.hi.real() + pad &&
         z.imag() >= b.lo.imag() - pad && z.imag() <= b.hi.imag() + pad;
}

int local_multiplicity(const Evaluator& f, Complex z, double rho, const ContourOptions& opt) {
  ContourOptions small = opt;
  small.initial_segments = 16;
  for (int attempt = 0; attempt < 4; ++attempt, rho *= 0.37) {
    try {
      return rectangle_winding(f, z - Complex(rho, rho), z + Complex(rho, rho), small);
    } catch (const ContourOnZero&) {
    }
  }
  return 0;
}

class Isolator {
 public:
  Isolator(const OrbitModel& model, const Evaluator& f, const ContourOptions& opt)
      : model_(model), f_(f), opt_(opt) {}

  void run(const Box& b, int w, RootSearch& out) {
    if (w <= 0) return;
    const double width = b.hi.real() - b.lo.real();
    const double height = b.hi.imag() - b.lo.imag();
    const double size = std::max(width, height);
    if (w == 1 || size < 1e-3) {
      solve_box(b, w, out);
      return;
    }
    static constexpr double kFractions[] = {0.5123, 0.4629, 0.5417, 0.4311, 0.5809};
    for (double frac : kFractions) {
      Box a = b, c = b;
      if (width >= height) {
        const double x = b.lo.real() + frac * width;
        a.hi = Complex(x, b.hi.imag());
        c.lo = Complex(x, b.lo.imag());
      } else {
        const double y = b.lo.imag() + frac * height;
        a.hi = Complex(b.hi.real(), y);
        c.lo = Complex(b.lo.real(), y);
      }
      int wa = 0, wc = 0;
      try {
        wa = rectangle_winding(f_, a.lo, a.hi, opt_);
        wc = rectangle_winding(f_, c.lo, c.hi, opt_);
      } catch (const ContourOnZero&) {
        continue;
      }
      if (wa + wc != w) continue;
      run(a, wa, out);
      run(c, wc, out);
      return;
    }
    out.unresolved.push_back({0.5 * (b.lo + b.hi), w, false, false, b.lo, b.hi, w});
  }

 private:
  void solve_box(const Box& b, int w, RootSearch& out) {
    if (w > 4) {
      out.unresolved.push_back({0.5 * (b.lo + b.hi), w, false, false, b.lo, b.hi, w});
      return;
    }
    const double size = std::max(b.hi.real() - b.lo.real(), b.hi.imag() - b.lo.imag());
    const Complex d = b.hi - b.lo;
    static constexpr double kStarts[][2] = {{0.5, 0.5}, {0.25, 0.25}, {0.75, 0.75},
                                            {0.25, 0.75}, {0.75, 0.25}};
    for (const auto& st : kStarts) {
      const Complex z0 = b.lo + Complex(st[0] * d.real(), st[1] * d.imag());
      const NewtonResult r = newton(model_, z0, w, opt_.shooting);
      if (!r.converged || !inside(b, r.z, 1e-9 * (1.0 + size))) continue;
      const double rho = std::clamp(0.25 * size, 1e-7, 1e-4);
      const int mult = local_multiplicity(f_, r.z, rho, opt_);
      if (mult <= 0) continue;
      out.roots.push_back({r.z, mult, true, false, b.lo, b.hi, w});
      return;
    }
    out.unresolved.push_back({0.5 * (b.lo + b.hi), w, false, false, b.lo, b.hi, w});
  }

  const OrbitModel& model_;
  const Evaluator& f_;
  const ContourOptions& opt_;
};

void edge_scan(const OrbitModel& model, const Evaluator& f, const Band& band, const Window& window,
               const ContourOptions& opt, RootSearch& out) {
  const int n = 1600;
  const double y = band.im_min;
  std::vector<double> g(n + 1);
  for (int i = 0; i <= n; ++i) {
    const double x = window.re_min + (window.re_max - window.re_min) * i / n;
    const Sample s = f(Complex(x, y));
    g[static_cast<std::size_t>(i)] = std::abs(s.value) / s.scale;
  }
  for (int i = 0; i <= n; ++i) {
    const auto u = static_cast<std::size_t>(i);
    const bool local_min = (i == 0 || g[u] <= g[u - 1]) && (i == n || g[u] <= g[u + 1]);
    if (!local_min || g[u] > 1e-3) continue;
    const double x = window.re_min + (window.re_max - window.re_min) * i / n;
    const NewtonResult r = newton(model, Complex(x, y), 1, opt.shooting);
    if (!r.converged || std::abs(r.z.imag() - y) > 1e-8) continue;
    if (r.z.real() < window.re_min || r.z.real() > window.re_max) continue;
    const bool known = std::any_of(out.roots.begin(), out.roots.end(), [&](const auto& k) {
      return std::abs(k.lambda - r.z) < 1e-7;
    });
    if (known) continue;
    const int mult = std::max(1, local_multiplicity(f, r.z, 1e-7, opt));
    out.roots.push_back({r.z, mult, true, true, r.z, r.z, mult});
  }
}

}  // namespace

int winding_number(const OrbitModel& model, Complex lo, Complex hi, const ContourOptions& opt) {
  return rectangle_winding(model_evaluator(model, opt.shooting), lo, hi, opt);
}

int winding_number(const std::function<Complex(Complex)>& f,
                   const std::function<double(Complex)>& scale, Complex lo, Complex hi,
                   const ContourOptions& opt) {
  const Evaluator e = [&](Complex z) { return Sample{f(z), scale(z)}; };
  return rectangle_winding(e, lo, hi, opt);
}

int count_zeros_in_band(const OrbitModel& model, const Band& band, const Window& window,
                        const ContourOptions& opt) {
  return band_contour(model_evaluator(model, opt.shooting), band, window, opt).winding;
}

RootSearch find_eigenvalues(const OrbitModel& model, const Band& band, const Window& window,
                            const ContourOptions& opt) {
  const Evaluator f = model_evaluator(model, opt.shooting);
  const BandContour bc = band_contour(f, band, window, opt);
  RootSearch out;
  out.winding = bc.winding;
  Isolator(model, f, opt).run(bc.box, bc.winding, out);
  // Merge duplicates that straddled a split line.
  std::vector<RootEstimate> merged;
  for (const auto& r : out.roots) {
    auto it = std::find_if(merged.begin(), merged.end(),
                           [&](const auto& m) { return std::abs(m.lambda - r.lambda) < 1e-7; });
    if (it == merged.end()) merged.push_back(r);
  }
  out.roots = std::move(merged);
  if (band.closed_below) edge_scan(model, f, band, window, opt, out);
  std::sort(out.roots.begin(), out.roots.end(), [](const auto& a, const auto& b) {
    return std::pair(a.lambda.imag(), a.lambda.real()) > std::pair(b.lambda.imag(), b.lambda.real());
  });
  return out;
}

}  // namespace nlbvp::pencil
