#include "sphcs/heat_kernels.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <string>

namespace sphcs {

const char *to_string(KernelMethod m) {
  switch (m) {
  case KernelMethod::theta_sum:
    return "theta_sum";
  case KernelMethod::spectral:
    return "spectral";
  case KernelMethod::auto_select:
    return "auto";
  }
  return "?";
}

KernelMethod kernel_method_from_string(const std::string &s) {
  if (s == "theta_sum" || s == "theta")
    return KernelMethod::theta_sum;
  if (s == "spectral")
    return KernelMethod::spectral;
  if (s == "auto")
    return KernelMethod::auto_select;
  throw InvalidArgument("unknown kernel method '" + s + "'");
}

void TruncationSpec::validate() const {
  if (max_image_index < 1 || max_degree < 1 || contour_nodes < 1)
    throw InvalidArgument("truncation limits must be positive");
  if (!(target_abs_error > 0) || target_abs_error > 1e-4)
    throw InvalidArgument("target_abs_error must lie in (0, 1e-4]");
}

namespace {

constexpr double kTwoPi = 2.0 * kPi;

void validate_request(const KernelEvalRequest &req) {
  if (req.dim < 1 || req.dim > 3)
    throw UnsupportedDimension(req.dim);
  if (!(req.time > 0) || !std::isfinite(req.time))
    throw InvalidArgument("kernel time must be positive");
  if (!std::isfinite(req.argument.real()) ||
      !std::isfinite(req.argument.imag()))
    throw InvalidArgument("kernel argument must be finite");
  req.truncation.validate();
}

// Representative of theta under theta -> -theta and theta -> theta + 2 pi
// with real part in [0, pi].
cplx reduce_angle(cplx theta) {
  double x = std::fmod(theta.real(), kTwoPi);
  double y = theta.imag();
  if (x < 0)
    x += kTwoPi;
  if (x > kPi) {
    x = kTwoPi - x;
    y = -y;
  }
  return {x, y};
}

// k-th derivative of exp(-u^2 / 2 tau), k <= 4:
// (-1/sqrt(tau))^k He_k(u / sqrt(tau)) exp(-u^2 / 2 tau).
cplx gaussian_derivative(int k, cplx u, double tau) {
  const double st = std::sqrt(tau);
  const cplx z = u / st;
  cplx he0 = 1.0, he1 = z;
  cplx he = k == 0 ? he0 : he1;
  for (int n = 1; n < k; ++n) {
    he = z * he1 - static_cast<double>(n) * he0;
    he0 = he1;
    he1 = he;
  }
  return std::pow(-1.0 / st, k) * he * std::exp(-u * u / (2.0 * tau));
}

// Bound on |g^{(k)}(u + i y)| for real u.
double gaussian_derivative_bound(int k, double u, double y, double tau) {
  const double poly =
      std::pow((std::abs(u) + std::abs(y)) / tau + k / std::sqrt(tau), k);
  return poly * std::exp((y * y - u * u) / (2.0 * tau));
}

struct ImageWindow {
  int n_lo = 0, n_hi = 0;
  double omitted = 0.0; // bound on the omitted image terms (before prefactor)
};

// Images n with Re(theta) - 2 pi n within D of [xa, xb], D grown until the
// omitted terms of the k-th derivative sum are below `budget`.
ImageWindow image_window(double xa, double xb, double y, double tau, int k,
                         double budget, int max_index) {
  double d2 = y * y + 2.0 * tau * (std::log(1.0 / budget) + 30.0);
  for (int attempt = 0; attempt < 8; ++attempt) {
    const double D = std::sqrt(std::max(d2, 0.0));
    ImageWindow w;
    w.n_lo = static_cast<int>(std::ceil((xa - D) / kTwoPi));
    w.n_hi = static_cast<int>(std::floor((xb + D) / kTwoPi));
    // The nearest images are always kept so tiny values stay positive.
    w.n_lo = std::min(w.n_lo, 0);
    w.n_hi = std::max(w.n_hi, xb > 0.5 * kPi ? 1 : 0);
    if (std::max(std::abs(w.n_lo), std::abs(w.n_hi)) > max_index)
      throw NonConvergence("theta-sum window exceeds max_image_index");
    for (int j = 1; j <= 40; ++j) {
      w.omitted += gaussian_derivative_bound(k, kTwoPi * (w.n_hi + j) - xb, y,
                                             tau);
      w.omitted += gaussian_derivative_bound(k, xa - kTwoPi * (w.n_lo - j), y,
                                             tau);
    }
    if (w.omitted <= budget)
      return w;
    d2 += 2.0 * tau * 20.0 + 4.0 * D * std::sqrt(tau);
  }
  throw NonConvergence("theta-sum truncation bound not reached");
}

// sum_n s^n g^{(k)}(theta - 2 pi n), s = -1 when alternating.
cplx image_sum(int k, cplx theta, double tau, const ImageWindow &w,
               bool alternating) {
  cplx s = 0.0;
  for (int n = w.n_lo; n <= w.n_hi; ++n) {
    const double sign = (alternating && (n & 1)) ? -1.0 : 1.0;
    s += sign * gaussian_derivative(k, theta - kTwoPi * n, tau);
  }
  return s;
}

constexpr double kSeriesRadius = 1e-4;

// f(theta) / sin(theta) for an odd-about-theta0 function f with f(theta0) = 0,
// theta0 in {0, pi}. deriv(k) returns f^{(k)}(theta). Within kSeriesRadius of
// theta0 the quotient is evaluated from f'(theta0) and f'''(theta0).
template <class Deriv, class DerivAt>
cplx over_sine(cplx theta, const Deriv &deriv, const DerivAt &deriv_at,
               bool &series) {
  const double theta0 = theta.real() < 0.5 * kPi ? 0.0 : kPi;
  const cplx eps = theta - theta0;
  series = std::abs(eps) < kSeriesRadius;
  if (!series)
    return deriv(0) / std::sin(theta);
  const double c0 = theta0 == 0.0 ? 1.0 : -1.0;
  const cplx e2 = eps * eps;
  return (deriv_at(1) + deriv_at(3) * e2 / 6.0) / (c0 * (1.0 - e2 / 6.0));
}

KernelValue rho_theta_d1(cplx theta, double tau, const TruncationSpec &t) {
  const double pref = std::pow(kTwoPi * tau, -0.5);
  const ImageWindow w = image_window(theta.real(), theta.real(), theta.imag(),
                                     tau, 0, t.target_abs_error / pref,
                                     t.max_image_index);
  KernelValue out;
  out.value = pref * image_sum(0, theta, tau, w, false);
  out.error_bound = pref * w.omitted;
  out.terms = w.n_hi - w.n_lo + 1;
  out.method = KernelMethod::theta_sum;
  return out;
}

// T(theta) = sum_n (theta - 2 pi n) e^{-(theta - 2 pi n)^2 / 2 tau}
// = -tau sum_n g'(theta - 2 pi n), so T^{(k)} = -tau S_{k+1}.
KernelValue rho_theta_d3(cplx theta, double tau, const TruncationSpec &t) {
  const double pref = std::pow(kTwoPi * tau, -1.5) * std::exp(0.5 * tau);
  const double sin_floor = std::max(std::abs(std::sin(theta)), kSeriesRadius);
  const ImageWindow w = image_window(
      theta.real(), theta.real(), theta.imag(), tau, 4,
      t.target_abs_error * sin_floor / (pref * tau), t.max_image_index);
  const double theta0 = theta.real() < 0.5 * kPi ? 0.0 : kPi;
  auto deriv = [&](int k) { return -tau * image_sum(k + 1, theta, tau, w, false); };
  auto deriv_at = [&](int k) {
    return -tau * image_sum(k + 1, cplx(theta0, 0.0), tau, w, false);
  };
  bool series = false;
  KernelValue out;
  out.value = pref * over_sine(theta, deriv, deriv_at, series);
  out.error_bound = pref * tau * w.omitted / sin_floor;
  out.terms = w.n_hi - w.n_lo + 1;
  out.method = KernelMethod::theta_sum;
  return out;
}

// rho^2 = (2 pi tau)^{-1} e^{tau/8} (pi tau)^{-1/2}
//         int_theta^pi g2(phi) / sqrt(cos theta - cos phi) dphi,
// g2(phi) = sum_n (-1)^n (phi - 2 pi n) e^{-(phi - 2 pi n)^2 / 2 tau},
// along phi = theta + (pi - theta) u^2. With h = (pi - theta) u^2 and
// w = (pi - theta)(1 - u^2/2) the integrand in u is
//   2 g2(theta + h) / sqrt(S(h/2) (1 - u^2/2) S(w)),  S(z) = sin z / z.
KernelValue rho_theta_d2(cplx theta, double tau, const TruncationSpec &t) {
  const double pref =
      std::exp(tau / 8.0) / (kTwoPi * tau * std::sqrt(kPi * tau));
  const double y = theta.imag();
  const ImageWindow w =
      image_window(theta.real(), kPi, y, tau, 1,
                   t.target_abs_error / (10.0 * pref * tau), t.max_image_index);
  const cplx span = kPi - theta;
  std::function<cplx(double)> integrand = [&](double u) {
    const cplx h = span * (u * u);
    const double q = 1.0 - 0.5 * u * u;
    const cplx wv = span * q;
    const cplx g2 = -tau * image_sum(1, theta + h, tau, w, true);
    return 2.0 * g2 /
           (std::sqrt(sinc(0.5 * h)) * std::sqrt(q) * std::sqrt(sinc(wv)));
  };
  // Rounding in the image sum is relative to the integral of |integrand|.
  std::function<double(double)> magnitude = [&](double u) {
    return std::abs(integrand(u));
  };
  const double mass = detail::gl_panel(magnitude, 0.0, 0.5, t.contour_nodes) +
                      detail::gl_panel(magnitude, 0.5, 1.0, t.contour_nodes);
  const double tol =
      std::max(t.target_abs_error / (2.0 * pref), 1e-14 * mass);
  const auto res =
      integrate_adaptive<cplx>(integrand, 0.0, 1.0, tol, 30, t.contour_nodes);
  KernelValue out;
  out.value = pref * res.value;
  out.error_bound = pref * (res.error + 10.0 * tau * w.omitted);
  out.terms = res.evaluations;
  out.method = KernelMethod::theta_sum;
  return out;
}

// log of the bound w_l G_l(1) e^{l |y| - tau l (l + d - 1) / 2} on term l.
double log_term_bound(int dim, int l, double y, double tau) {
  double g1 = 1.0;
  if (dim == 3)
    g1 = l + 1.0;
  return std::log(zonal_weight(dim, l) * g1) + l * std::abs(y) -
         0.5 * tau * casimir(dim, l);
}

} // namespace

double unit_sphere_volume(int n) {
  if (n < 1)
    throw InvalidArgument("unit_sphere_volume needs n >= 1");
  return 2.0 * std::pow(kPi, 0.5 * n) / std::tgamma(0.5 * n);
}

double zonal_weight(int dim, int degree) {
  if (dim < 1)
    throw UnsupportedDimension(dim);
  if (dim == 1)
    return degree == 0 ? 1.0 / kTwoPi : 1.0 / kPi;
  return (2.0 * degree + dim - 1) / ((dim - 1) * unit_sphere_volume(dim + 1));
}

cplx gegenbauer_eval(int dim, int degree, cplx z) {
  if (degree < 0)
    throw InvalidArgument("degree must be >= 0");
  if (dim < 1)
    throw UnsupportedDimension(dim);
  if (degree == 0)
    return 1.0;
  if (dim == 1) {
    cplx t0 = 1.0, t1 = z;
    for (int n = 1; n < degree; ++n) {
      const cplx t2 = 2.0 * z * t1 - t0;
      t0 = t1;
      t1 = t2;
    }
    return t1;
  }
  const double lam = 0.5 * (dim - 1);
  cplx c0 = 1.0, c1 = 2.0 * lam * z;
  for (int n = 1; n < degree; ++n) {
    const cplx c2 =
        (2.0 * (n + lam) * z * c1 - (n + 2.0 * lam - 1.0) * c0) / (n + 1.0);
    c0 = c1;
    c1 = c2;
  }
  return c1;
}

KernelValue rho_sphere_theta(const KernelEvalRequest &req) {
  validate_request(req);
  const cplx theta = reduce_angle(req.argument);
  switch (req.dim) {
  case 1:
    return rho_theta_d1(theta, req.time, req.truncation);
  case 2:
    return rho_theta_d2(theta, req.time, req.truncation);
  default:
    return rho_theta_d3(theta, req.time, req.truncation);
  }
}

KernelValue rho_sphere_spectral(const KernelEvalRequest &req) {
  validate_request(req);
  const double tau = req.time;
  if (tau < kSpectralMinTau)
    throw NonConvergence("spectral kernel needs tau >= " +
                         std::to_string(kSpectralMinTau));
  const int dim = req.dim;
  const double y = req.argument.imag();
  const cplx z = std::cos(req.argument);
  const double log_target = std::log(req.truncation.target_abs_error);

  // Terms past the peak of the bound decay faster than geometrically.
  const int l_peak = std::max(
      0, static_cast<int>(std::ceil((std::abs(y) + 1.0) / tau)));
  const double lam = 0.5 * (dim - 1);
  cplx g0 = 1.0, g1 = dim == 1 ? z : 2.0 * lam * z;
  cplx sum = zonal_weight(dim, 0) * 1.0;
  for (int l = 1; l <= req.truncation.max_degree; ++l) {
    const cplx gl = l == 1 ? g1 : [&] {
      cplx g2;
      if (dim == 1)
        g2 = 2.0 * z * g1 - g0;
      else
        g2 = (2.0 * (l - 1 + lam) * z * g1 - (l - 1 + 2.0 * lam - 1.0) * g0) /
             static_cast<double>(l);
      g0 = g1;
      g1 = g2;
      return g2;
    }();
    sum += zonal_weight(dim, l) * std::exp(-0.5 * tau * casimir(dim, l)) * gl;
    if (l < l_peak)
      continue;
    const double b1 = log_term_bound(dim, l + 1, y, tau);
    const double b2 = log_term_bound(dim, l + 2, y, tau);
    if (b2 >= b1)
      continue;
    const double q = std::exp(b2 - b1);
    const double tail = std::exp(b1) / (1.0 - q);
    if (std::log(tail) <= log_target) {
      KernelValue out;
      out.value = sum;
      out.error_bound = tail;
      out.terms = l + 1;
      out.method = KernelMethod::spectral;
      return out;
    }
  }
  throw NonConvergence("spectral kernel tail bound not reached within "
                       "max_degree");
}

KernelValue rho_sphere(const KernelEvalRequest &req) {
  KernelMethod m = req.method;
  if (m == KernelMethod::auto_select)
    m = req.time < kAutoSpectralTau ? KernelMethod::theta_sum
                                    : KernelMethod::spectral;
  return m == KernelMethod::spectral ? rho_sphere_spectral(req)
                                     : rho_sphere_theta(req);
}

std::pair<cplx, cplx> rho_recursion_check(int dim_from, double tau,
                                          cplx theta) {
  if (dim_from != 1)
    throw UnsupportedDimension(dim_from,
                               "recursion check is wired for d = 1 -> 3");
  KernelEvalRequest req;
  req.dim = 3;
  req.time = tau;
  req.argument = theta;
  req.method = KernelMethod::theta_sum;
  validate_request(req);
  const cplx th = reduce_angle(theta);
  const double target = 1e-16;
  const ImageWindow w =
      image_window(th.real(), th.real(), th.imag(), tau, 4, target, 200);
  const double pref1 = std::pow(kTwoPi * tau, -0.5);
  const double theta0 = th.real() < 0.5 * kPi ? 0.0 : kPi;
  // d/dtheta rho^1 and its derivatives, differentiated term by term.
  auto drho = [&](int k) { return pref1 * image_sum(k + 1, th, tau, w, false); };
  auto drho_at = [&](int k) {
    return pref1 * image_sum(k + 1, cplx(theta0, 0.0), tau, w, false);
  };
  bool series = false;
  const cplx quotient = over_sine(th, drho, drho_at, series);
  const cplx recursion = -std::exp(0.5 * tau) / kTwoPi * quotient;
  return {recursion, rho_sphere_theta(req).value};
}

namespace {

// nu_2 via rho = R + t^2, with e^{-R^2/2s} e^{-R/2} factored out:
//   int_R^inf rho e^{-rho^2/2s} / sqrt(cosh rho - cosh R) drho
//   = e^{-R^2/2s - R/2} int_0^inf 2 rho e^{-(2 R t^2 + t^4)/2s - t^2/4}
//       / sqrt((1 - e^{-2R - t^2})/2 * shc(t^2/2)) dt.
double nu2(double s, double R, double target, double &err, int &evals) {
  const double pref = std::exp(-s / 8.0) / (kTwoPi * s * std::sqrt(kPi * s));
  const double outer = std::exp(-R * R / (2.0 * s) - 0.5 * R);
  const double t_max = std::pow(2.0 * s * 50.0, 0.25);
  std::function<double(double)> f = [&](double t) {
    const double t2 = t * t;
    const double rho = R + t2;
    const double damp = std::exp(-(2.0 * R * t2 + t2 * t2) / (2.0 * s) - 0.25 * t2);
    const double den =
        std::sqrt(-0.5 * std::expm1(-2.0 * R - t2) * sinhc(0.5 * t2));
    if (t == 0.0)
      return R == 0.0 ? 0.0 : 2.0 * R / std::sqrt(-0.5 * std::expm1(-2.0 * R));
    return 2.0 * rho * damp / den;
  };
  const double rough = detail::gl_panel(f, 0.0, t_max, 20);
  const double tol =
      std::max(1e-14 * std::abs(rough), target / (pref * outer + 1e-300));
  const auto res = integrate_adaptive<double>(f, 0.0, t_max, tol);
  // Omitted tail beyond t_max is below e^{-50} times the integrand scale.
  err = pref * outer * (res.error + std::exp(-50.0) * (1.0 + R) * t_max);
  evals = res.evaluations;
  return pref * outer * res.value;
}

} // namespace

KernelValue nu_hyperbolic(const KernelEvalRequest &req) {
  validate_request(req);
  if (req.argument.imag() != 0.0)
    throw InvalidArgument("hyperbolic radius must be real");
  const double R = req.argument.real();
  if (R < 0)
    throw InvalidArgument("hyperbolic radius must be >= 0");
  const double s = req.time;
  KernelValue out;
  out.method = KernelMethod::theta_sum;
  out.terms = 1;
  switch (req.dim) {
  case 1:
    out.value = std::pow(kTwoPi * s, -0.5) * std::exp(-R * R / (2.0 * s));
    break;
  case 3:
    out.value = std::pow(kTwoPi * s, -1.5) *
                std::exp(-0.5 * s - R * R / (2.0 * s)) / sinhc(R);
    break;
  default: {
    double err = 0.0;
    int evals = 0;
    out.value = nu2(s, R, req.truncation.target_abs_error, err, evals);
    out.error_bound = err;
    out.terms = evals;
  }
  }
  return out;
}

double nu_hyperbolic(int dim, double s, double R, double target_abs_error) {
  KernelEvalRequest req;
  req.dim = dim;
  req.time = s;
  req.argument = R;
  req.truncation.target_abs_error = target_abs_error;
  return nu_hyperbolic(req).value.real();
}

double nu_recursion_d3(double s, double R) {
  if (!(s > 0) || R < 0)
    throw InvalidArgument("nu recursion needs s > 0 and R >= 0");
  // d nu_1 / dR = -(R / s) nu_1; the quotient R / sinh R is taken as 1/shc.
  const double nu1 = std::pow(kTwoPi * s, -0.5) * std::exp(-R * R / (2.0 * s));
  const double dnu1_over_sinh = -nu1 / (s * sinhc(R));
  return -std::exp(-0.5 * s) / kTwoPi * dnu1_over_sinh;
}

double nu_normalization_check(int dim, double s) {
  if (dim < 1 || dim > 3)
    throw UnsupportedDimension(dim);
  if (!(s > 0))
    throw InvalidArgument("s must be positive");
  const double r_max = (dim - 1) * s + std::sqrt(2.0 * s * 80.0) + 1.0;
  std::function<double(double)> f = [&](double R) {
    return nu_hyperbolic(dim, s, R, 1e-15) * std::pow(std::sinh(R), dim - 1);
  };
  const auto res = integrate_adaptive<double>(f, 0.0, r_max, 1e-13);
  return unit_sphere_volume(dim) * res.value;
}

} // namespace sphcs
