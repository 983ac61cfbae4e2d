#include "isac/angle.hpp"

#include <algorithm>

namespace isac {

std::pair<double, double> AngleSpectrum::argmax() const {
  const auto& d = power.data();
  const auto i = static_cast<std::size_t>(
      std::distance(d.begin(), std::max_element(d.begin(), d.end())));
  return {az_grid[i % az_grid.size()], el_grid[i / az_grid.size()]};
}

BartlettBeamformer::BartlettBeamformer(const ArrayGeometry& geom,
                                       std::vector<double> az_grid,
                                       std::vector<double> el_grid)
    : n_elements_(static_cast<std::size_t>(geom.n_elements())),
      az_grid_(std::move(az_grid)),
      el_grid_(std::move(el_grid)) {
  if (az_grid_.empty() || el_grid_.empty())
    throw ValidationError("angle_spectrum: empty angle grid");
  steering_.reserve(az_grid_.size() * el_grid_.size());
  for (double el : el_grid_)
    for (double az : az_grid_) steering_.push_back(steering_vector(geom, az, el));
}

AngleSpectrum BartlettBeamformer::spectrum(std::span<const cplx> snapshot) const {
  if (snapshot.size() != n_elements_)
    throw ShapeError("angle_spectrum: snapshot of " + std::to_string(snapshot.size()) +
                     " samples for " + std::to_string(n_elements_) + " elements");
  AngleSpectrum out{az_grid_, el_grid_, RMatrix({el_grid_.size(), az_grid_.size()})};
  auto& pw = out.power.data();
  const double inv_p = 1.0 / static_cast<double>(n_elements_);
  for (std::size_t i = 0; i < steering_.size(); ++i) {
    cplx acc{};
    const auto& psi = steering_[i];
    for (std::size_t p = 0; p < n_elements_; ++p) acc += std::conj(psi[p]) * snapshot[p];
    pw[i] = std::norm(acc) * inv_p;
  }
  return out;
}

AngleSpectrum angle_spectrum(std::span<const cplx> snapshot, const ArrayGeometry& geom,
                             std::span<const double> az_grid,
                             std::span<const double> el_grid) {
  BartlettBeamformer bf(geom, {az_grid.begin(), az_grid.end()},
                        {el_grid.begin(), el_grid.end()});
  return bf.spectrum(snapshot);
}

RMatrix BeamScanMap::peak_map() const {
  RMatrix out({power.dim(1), power.dim(2)});
  for (std::size_t e = 0; e < power.dim(1); ++e)
    for (std::size_t a = 0; a < power.dim(2); ++a) {
      double best = 0.0;
      for (std::size_t l = 0; l < power.dim(0); ++l) best = std::max(best, power(l, e, a));
      out(e, a) = best;
    }
  return out;
}

std::pair<std::size_t, std::size_t> BeamScanMap::argmax_beam() const {
  const auto pk = peak_map();
  const auto& d = pk.data();
  const auto i = static_cast<std::size_t>(
      std::distance(d.begin(), std::max_element(d.begin(), d.end())));
  return {i % az_grid.size(), i / az_grid.size()};
}

BeamScanMap beam_scan_map(std::span<const RangeProfile> profiles,
                          const BeamCodebook& codebook) {
  if (profiles.size() != codebook.size())
    throw ShapeError("beam_scan_map: " + std::to_string(profiles.size()) +
                     " profiles for a codebook of " + std::to_string(codebook.size()) +
                     " beams");
  if (profiles.empty()) throw ShapeError("beam_scan_map: empty codebook");
  const std::size_t nl = profiles.front().magnitude.size();
  const std::size_t naz = codebook.az_grid.size(), nel = codebook.el_grid.size();
  BeamScanMap map{codebook.az_grid, codebook.el_grid, std::vector<double>(nl),
                  Tensor<double, 3>({nl, nel, naz})};
  for (std::size_t l = 0; l < nl; ++l)
    map.range_axis_m[l] = profiles.front().tap_distance_m * static_cast<double>(l);
  for (std::size_t e = 0; e < nel; ++e)
    for (std::size_t a = 0; a < naz; ++a) {
      const auto& prof = profiles[codebook.index(a, e)];
      if (prof.magnitude.size() != nl)
        throw ShapeError("beam_scan_map: profiles differ in length");
      for (std::size_t l = 0; l < nl; ++l)
        map.power(l, e, a) = prof.magnitude[l] * prof.magnitude[l];
    }
  return map;
}

RadarCube build_cube(const CirMatrix& cir, const ArrayGeometry& geom,
                     std::span<const double> az_grid, std::span<const double> el_grid,
                     Window window, std::size_t max_taps) {
  const std::size_t np = cir.n_elements();
  if (np != static_cast<std::size_t>(geom.n_elements()))
    throw ShapeError("build_cube: CIR has " + std::to_string(np) + " elements, array has " +
                     std::to_string(geom.n_elements()));
  if (np == 1 && az_grid.size() * el_grid.size() > 1)
    throw ValidationError(
        "build_cube: single-element CIR cannot resolve angles; use beam_scan_map for "
        "beam-scan sensing");
  const auto spectrum = doppler_transform(cir, window);
  const std::size_t nl = max_taps ? std::min(max_taps, cir.n_taps()) : cir.n_taps();
  const std::size_t nq = cir.n_symbols();
  BartlettBeamformer bf(geom, {az_grid.begin(), az_grid.end()},
                        {el_grid.begin(), el_grid.end()});

  RadarCube cube{RTensor4({nl, nq, az_grid.size(), el_grid.size()}), {}, {},
                 {az_grid.begin(), az_grid.end()}, {el_grid.begin(), el_grid.end()}};
  cube.range_axis_m.resize(nl);
  for (std::size_t l = 0; l < nl; ++l) cube.range_axis_m[l] = cir.tap_distance_m(l);
  cube.velocity_axis_mps = velocity_axis(nq, cir.symbol_interval_s(), cir.wavelength_m());

  CVec snap(np);
  for (std::size_t l = 0; l < nl; ++l)
    for (std::size_t q = 0; q < nq; ++q) {
      for (std::size_t p = 0; p < np; ++p) snap[p] = spectrum(l, q, p);
      const auto s = bf.spectrum(snap);
      for (std::size_t e = 0; e < el_grid.size(); ++e)
        for (std::size_t a = 0; a < az_grid.size(); ++a) cube.power(l, q, a, e) = s.power(e, a);
    }
  return cube;
}

}  // namespace isac
