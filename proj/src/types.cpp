#include "csmri/types.hpp"

#include <fmt/format.h>

namespace csmri {

void Dims::validate() const
{
  if (nv < 1 || nh < 1 || nt < 1 || nc < 1) { throw Error(fmt::format("invalid dims {}: every extent must be >= 1", to_string(*this))); }
}

auto to_string(Dims const &d) -> std::string
{
  return fmt::format("(nv={}, nh={}, nt={}, nc={})", d.nv, d.nh, d.nt, d.nc);
}

void check_image_dims(Dims const &expected, Dims const &actual, char const *what)
{
  auto fail = [&](char const *axis, Index e, Index a) {
    throw Error(fmt::format("{}: dimension mismatch on axis {} (expected {}, got {})", what, axis, e, a));
  };
  if (expected.nv != actual.nv) { fail("nv", expected.nv, actual.nv); }
  if (expected.nh != actual.nh) { fail("nh", expected.nh, actual.nh); }
  if (expected.nt != actual.nt) { fail("nt", expected.nt, actual.nt); }
}

CoilSensitivities::CoilSensitivities(Index nv, Index nh, Index nc)
  : nv_{nv}
  , nh_{nh}
  , nc_{nc}
{
  if (nv < 1 || nh < 1 || nc < 1) { throw Error("sensitivity extents must be positive"); }
  data_.resize(static_cast<size_t>(nv * nh * nc));
}

void CoilSensitivities::validate() const
{
  for (Index h = 0; h < nh_; ++h) {
    for (Index v = 0; v < nv_; ++v) {
      double energy = 0.0;
      for (Index c = 0; c < nc_; ++c) {
        Cx const s = (*this)(v, h, c);
        if (!std::isfinite(s.real()) || !std::isfinite(s.imag())) {
          throw Error(fmt::format("non-finite sensitivity at (v={}, h={}, c={})", v, h, c));
        }
        energy += std::norm(s);
      }
      if (!(energy > 0.0)) { throw Error(fmt::format("zero coil energy at pixel (v={}, h={})", v, h)); }
    }
  }
}

SamplingMask::SamplingMask(Index nv, Index nt, bool value)
  : nv_{nv}
  , nt_{nt}
{
  if (nv < 1 || nt < 1) { throw Error("mask extents must be positive"); }
  kept_.assign(static_cast<size_t>(nv * nt), value ? 1 : 0);
}

auto SamplingMask::kept_count(Index t) const -> Index
{
  Index n = 0;
  for (Index v = 0; v < nv_; ++v) { n += kept(v, t) ? 1 : 0; }
  return n;
}

void SamplingMask::validate() const
{
  for (Index t = 0; t < nt_; ++t) {
    if (kept_count(t) == 0) { throw Error(fmt::format("mask keeps no lines in frame {}", t)); }
  }
}

KSpaceData::KSpaceData(Dims const &dims, SamplingMask mask)
  : dims_{dims}
  , mask_{std::move(mask)}
{
  dims_.validate();
  if (mask_.nv() != dims_.nv || mask_.nt() != dims_.nt) {
    throw Error(fmt::format("mask extents ({}, {}) do not match k-space {}", mask_.nv(), mask_.nt(), to_string(dims_)));
  }
  data_.resize(static_cast<size_t>(dims_.nv * dims_.nh * dims_.nc * dims_.nt));
}

void KSpaceData::check_zero_fill() const
{
  for (Index t = 0; t < dims_.nt; ++t) {
    for (Index v = 0; v < dims_.nv; ++v) {
      if (mask_.kept(v, t)) { continue; }
      for (Index c = 0; c < dims_.nc; ++c) {
        for (Index h = 0; h < dims_.nh; ++h) {
          if ((*this)(v, h, c, t) != Cx{}) {
            throw Error(fmt::format("nonzero sample in unsampled row (v={}, t={})", v, t));
          }
        }
      }
    }
  }
}

auto squared_norm(KSpaceData const &y) -> double
{
  double acc = 0.0;
  for (Index i = 0; i < y.size(); ++i) { acc += std::norm(y[i]); }
  return acc;
}

} // namespace csmri
