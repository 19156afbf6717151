// SPDX-License-Identifier: Apache-2.0
//
// hbss - hybrid FSO/MIMO blind source separation simulator
// Copyright (C) 2026 The hbss authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#include "hbss/separation.hpp"

#include <cmath>
#include <numbers>

namespace hbss {

namespace {

void require_samples(Eigen::Index n, const char* what) {
  if (n < kMinStatisticSamples)
    throw Error(ErrorKind::InsufficientSamples, std::string(what) + " needs at least " +
                                                    std::to_string(kMinStatisticSamples) + " samples, got " +
                                                    std::to_string(n));
}

}  // namespace

Eigen::Matrix2d real_covariance(const Observation& x) {
  if (x.cols() == 0) throw Error(ErrorKind::EmptyInput, "covariance of an empty observation");
  return (x * x.adjoint()).real() / static_cast<double>(x.cols());
}

Eigen::Matrix2d whitening_transform(const Eigen::Matrix2d& covariance) {
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> eig;
  eig.computeDirect(covariance);
  const Eigen::Vector2d lambda = eig.eigenvalues();
  if (!(lambda(0) > 1e-12 * lambda(1)))
    throw Error(ErrorKind::DegenerateInput, "observation covariance is rank deficient");
  return lambda.cwiseSqrt().cwiseInverse().asDiagonal() * eig.eigenvectors().transpose();
}

Whitened whiten(const Observation& x) {
  require_samples(x.cols(), "whitening");
  const Eigen::Matrix2d c = real_covariance(x);
  for (Eigen::Index i = 0; i < 2; ++i)
    if (!(c(i, i) > 0)) throw Error(ErrorKind::DegenerateInput, "channel x" + std::to_string(i + 1) + " has zero power");

  Whitened w;
  w.transform = whitening_transform(c);
  w.z = w.transform.cast<Complex>() * x;
  return w;
}

RotationContrast::RotationContrast(const Observation& z) {
  const Eigen::Index n = z.cols();
  require_samples(n, "rotation contrast");
  for (Eigen::Index k = 0; k < n; ++k) {
    const Complex z1 = z(0, k), z2 = z(1, k);
    const double a = std::norm(z1), b = std::norm(z2);
    const double m = (z1 * std::conj(z2)).real();
    ea_ += a;
    eb_ += b;
    em_ += m;
    q11_ += z1 * z1;
    q22_ += z2 * z2;
    q12_ += z1 * z2;
    eaa_ += a * a;
    ebb_ += b * b;
    emm_ += m * m;
    eab_ += a * b;
    eam_ += a * m;
    ebm_ += b * m;
  }
  const double inv = 1.0 / static_cast<double>(n);
  for (double* v : {&ea_, &eb_, &em_, &eaa_, &ebb_, &emm_, &eab_, &eam_, &ebm_}) *v *= inv;
  q11_ *= inv;
  q22_ *= inv;
  q12_ *= inv;
}

// y = c z1 + s z2, so |y|^2 = c^2 a + s^2 b + 2 c s m with m = Re(z1 z2*).
double RotationContrast::kurtosis(double c, double s) const {
  const double c2 = c * c, s2 = s * s, cs = c * s;
  const double p2 = c2 * ea_ + s2 * eb_ + 2.0 * cs * em_;
  const Complex q = c2 * q11_ + s2 * q22_ + 2.0 * cs * q12_;
  const double p4 = c2 * c2 * eaa_ + s2 * s2 * ebb_ + 4.0 * c2 * s2 * emm_ + 2.0 * c2 * s2 * eab_ +
                    4.0 * c2 * cs * eam_ + 4.0 * cs * s2 * ebm_;
  return p4 - 2.0 * p2 * p2 - std::norm(q);
}

double RotationContrast::kurtosis_of_first(double theta) const { return kurtosis(std::cos(theta), std::sin(theta)); }

double RotationContrast::operator()(double theta) const {
  const double c = std::cos(theta), s = std::sin(theta);
  return std::abs(kurtosis(c, s)) + std::abs(kurtosis(-s, c));
}

RotationEstimate find_rotation(const Observation& z) {
  const RotationContrast contrast(z);
  constexpr double quarter = std::numbers::pi / 2.0;
  constexpr double step = quarter / kRotationGridPoints;

  RotationEstimate est;
  double lowest = kInfinity;
  est.grid_contrast = -kInfinity;
  for (int k = 0; k < kRotationGridPoints; ++k) {
    const double theta = step * k;
    const double j = contrast(theta);
    lowest = std::min(lowest, j);
    if (j > est.grid_contrast) {
      est.grid_contrast = j;
      est.grid_angle = theta;
    }
  }
  est.low_confidence = est.grid_contrast - lowest < kLowConfidenceSpread;

  // golden-section maximization on [best - step, best + step]
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double lo = est.grid_angle - step, hi = est.grid_angle + step;
  double x1 = hi - inv_phi * (hi - lo), x2 = lo + inv_phi * (hi - lo);
  double f1 = contrast(x1), f2 = contrast(x2);
  while (hi - lo > kRotationTolerance) {
    if (f1 < f2) {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + inv_phi * (hi - lo);
      f2 = contrast(x2);
    } else {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - inv_phi * (hi - lo);
      f1 = contrast(x1);
    }
  }
  double refined = 0.5 * (lo + hi);
  double refined_contrast = contrast(refined);
  if (refined_contrast < est.grid_contrast) {
    refined = est.grid_angle;
    refined_contrast = est.grid_contrast;
  }
  refined = std::fmod(refined, quarter);
  if (refined < 0) refined += quarter;
  if (refined >= quarter) refined = 0;
  est.angle = refined;
  est.contrast = refined_contrast;
  return est;
}

DemixResult demix(const Observation& x, const std::optional<MixingMatrix>& truth) {
  const Whitened white = whiten(x);
  const RotationEstimate rot = find_rotation(white.z);
  DemixResult r;
  r.w = givens(rot.angle) * white.transform;
  r.outputs = givens(rot.angle).cast<Complex>() * white.z;
  r.contrast = rot.contrast;
  r.low_confidence = rot.low_confidence;
  if (truth) r.gain_matrix = r.w * truth->gains();
  return r;
}

double gain_leakage_db(const Eigen::Matrix2d& g) {
  const bool swapped = std::abs(g(0, 1) * g(1, 0)) > std::abs(g(0, 0) * g(1, 1));
  double worst = 0;
  for (Eigen::Index i = 0; i < 2; ++i) {
    const double diag = std::abs(g(i, swapped ? 1 - i : i));
    const double off = std::abs(g(i, swapped ? i : 1 - i));
    if (!(diag > 0)) return kInfinity;
    worst = std::max(worst, off / diag);
  }
  return worst > 0 ? 20.0 * std::log10(worst) : -kInfinity;
}

ComplexSequence shift(const ComplexSequence& x, Eigen::Index delay) {
  const Eigen::Index n = x.size();
  ComplexSequence out = ComplexSequence::Zero(n);
  const Eigen::Index len = n - std::abs(delay);
  if (len <= 0) return out;
  if (delay >= 0)
    out.tail(len) = x.head(len);
  else
    out.head(len) = x.tail(len);
  return out;
}

CancellationResult cancel_with_reference(const ComplexSequence& x1, const ComplexSequence& reference,
                                         Eigen::Index max_delay) {
  if (x1.size() != reference.size())
    throw Error(ErrorKind::LengthMismatch, "x1 has " + std::to_string(x1.size()) + " samples, reference has " +
                                               std::to_string(reference.size()));
  if (max_delay < 0 || 4 * max_delay >= x1.size())
    throw Error(ErrorKind::InvalidArgument, "max_delay must satisfy 0 <= max_delay < length / 4");
  if (!(reference.squaredNorm() > 0)) throw Error(ErrorKind::DegenerateReference, "reference has zero power");

  // Maximizing |<ref_d, x1>|^2 / ||ref_d||^2 is the same as minimizing the
  // least-squares residual, so a wider search never leaves more residual.
  Eigen::Index best_delay = 0;
  double best_score = -1;
  for (Eigen::Index d = -max_delay; d <= max_delay; ++d) {
    const ComplexSequence rd = shift(reference, d);
    const double energy = rd.squaredNorm();
    if (!(energy > 0)) continue;
    const double score = std::norm(rd.dot(x1)) / energy;
    if (score > best_score) {
      best_score = score;
      best_delay = d;
    }
  }

  CancellationResult r;
  const ComplexSequence rd = shift(reference, best_delay);
  r.delay = best_delay;
  r.coefficient = rd.dot(x1) / rd.squaredNorm();
  r.soi_estimate = x1 - r.coefficient * rd;
  return r;
}

PilotAlignment fit_pilot_alignment(const Observation& outputs, const ComplexSequence& pilot) {
  const Eigen::Index p = pilot.size();
  if (p == 0) throw Error(ErrorKind::InvalidPilot, "pilot is empty");
  if (p < kMinPilotLength)
    throw Error(ErrorKind::InvalidPilot, "pilot needs at least " + std::to_string(kMinPilotLength) + " symbols");
  if (outputs.cols() <= p) throw Error(ErrorKind::InsufficientSamples, "outputs must be longer than the pilot");
  const double pilot_norm = pilot.norm();
  if (!(pilot_norm > 0)) throw Error(ErrorKind::InvalidPilot, "pilot has zero power");

  PilotAlignment a;
  for (Eigen::Index i = 0; i < 2; ++i) {
    const ComplexSequence window = outputs.row(i).head(p).transpose();
    const double norm = window.norm();
    a.correlation[static_cast<std::size_t>(i)] = norm > 0 ? std::abs(window.dot(pilot)) / (norm * pilot_norm) : 0.0;
  }
  a.channel = a.correlation[1] > a.correlation[0] ? 1 : 0;
  const ComplexSequence window = outputs.row(a.channel).head(p).transpose();
  const double energy = window.squaredNorm();
  a.gain = energy > 0 ? window.dot(pilot) / energy : Complex(0);
  return a;
}

ComplexSequence apply_alignment(const Observation& outputs, const PilotAlignment& alignment) {
  return alignment.gain * outputs.row(alignment.channel).transpose();
}

ComplexSequence resolve_ambiguity(const Observation& outputs, const ComplexSequence& pilot) {
  const PilotAlignment a = fit_pilot_alignment(outputs, pilot);
  if (!a.resolved())
    throw Error(ErrorKind::AmbiguityUnresolved, "pilot correlations " + std::to_string(a.correlation[0]) + " and " +
                                                    std::to_string(a.correlation[1]) + " are both below " +
                                                    std::to_string(kPilotCorrelationThreshold));
  return apply_alignment(outputs, a);
}

}  // namespace hbss
