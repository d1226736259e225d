#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace csmri {

using Cx = std::complex<double>;
using Index = std::int64_t;

class Error : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

// Problem extents. n_v counts k-space lines (the undersampled axis).
struct Dims
{
  Index nv = 1;
  Index nh = 1;
  Index nt = 1;
  Index nc = 1;

  void validate() const;
  auto pixels() const -> Index { return nv * nh; }
  auto operator==(Dims const &) const -> bool = default;
};

auto to_string(Dims const &d) -> std::string;

// Throws naming the first axis (among nv, nh, nt) that differs.
void check_image_dims(Dims const &expected, Dims const &actual, char const *what);

/*
 * Complex array over (v, h, frame), v fastest. Two tags share the layout: image
 * sequences and transform-domain coefficient fields. The frame count of a
 * coefficient field can differ from the image's (temporal differences).
 */
template <typename Tag>
class Field
{
public:
  Field() = default;
  Field(Index nv, Index nh, Index frames)
    : nv_{nv}
    , nh_{nh}
    , nt_{frames}
    , data_(static_cast<size_t>(nv * nh * frames))
  {
    if (nv < 1 || nh < 1 || frames < 1) { throw Error("field extents must be positive"); }
  }
  explicit Field(Dims const &d)
    : Field(d.nv, d.nh, d.nt)
  {
  }

  auto nv() const -> Index { return nv_; }
  auto nh() const -> Index { return nh_; }
  auto frames() const -> Index { return nt_; }
  auto dims() const -> Dims { return {nv_, nh_, nt_, 1}; }
  auto size() const -> Index { return static_cast<Index>(data_.size()); }

  auto operator()(Index v, Index h, Index t) -> Cx & { return data_[v + nv_ * (h + nh_ * t)]; }
  auto operator()(Index v, Index h, Index t) const -> Cx const & { return data_[v + nv_ * (h + nh_ * t)]; }
  auto operator[](Index i) -> Cx & { return data_[i]; }
  auto operator[](Index i) const -> Cx const & { return data_[i]; }

  auto data() -> Cx * { return data_.data(); }
  auto data() const -> Cx const * { return data_.data(); }
  auto span() -> std::span<Cx> { return data_; }
  auto span() const -> std::span<Cx const> { return data_; }
  // Column (all v) at horizontal position h, frame t. Contiguous.
  auto column(Index h, Index t) -> std::span<Cx> { return {data_.data() + nv_ * (h + nh_ * t), size_t(nv_)}; }
  auto column(Index h, Index t) const -> std::span<Cx const>
  {
    return {data_.data() + nv_ * (h + nh_ * t), size_t(nv_)};
  }
  auto frame(Index t) -> std::span<Cx> { return {data_.data() + nv_ * nh_ * t, size_t(nv_ * nh_)}; }
  auto frame(Index t) const -> std::span<Cx const> { return {data_.data() + nv_ * nh_ * t, size_t(nv_ * nh_)}; }

  auto same_shape(Field const &o) const -> bool { return nv_ == o.nv_ && nh_ == o.nh_ && nt_ == o.nt_; }
  void set_zero() { std::fill(data_.begin(), data_.end(), Cx{}); }
  auto operator==(Field const &) const -> bool = default;

  auto operator+=(Field const &o) -> Field &
  {
    require_same(o);
    for (size_t i = 0; i < data_.size(); ++i) { data_[i] += o.data_[i]; }
    return *this;
  }
  auto operator-=(Field const &o) -> Field &
  {
    require_same(o);
    for (size_t i = 0; i < data_.size(); ++i) { data_[i] -= o.data_[i]; }
    return *this;
  }
  auto operator*=(Cx s) -> Field &
  {
    for (auto &z : data_) { z *= s; }
    return *this;
  }
  friend auto operator+(Field a, Field const &b) -> Field { return a += b; }
  friend auto operator-(Field a, Field const &b) -> Field { return a -= b; }
  friend auto operator*(Cx s, Field a) -> Field { return a *= s; }
  friend auto operator*(double s, Field a) -> Field { return a *= Cx{s}; }

private:
  void require_same(Field const &o) const
  {
    if (!same_shape(o)) { throw Error("field shape mismatch"); }
  }

  Index nv_ = 0;
  Index nh_ = 0;
  Index nt_ = 0;
  std::vector<Cx> data_;
};

struct ImageTag
{
};
struct CoefficientTag
{
};
using ImageSequence = Field<ImageTag>;
using CoefficientField = Field<CoefficientTag>;

// a += s * b
template <typename Tag>
void axpy(Cx s, Field<Tag> const &b, Field<Tag> &a)
{
  if (!a.same_shape(b)) { throw Error("field shape mismatch"); }
  for (Index i = 0; i < a.size(); ++i) { a[i] += s * b[i]; }
}

// <a, b> = sum conj(a) b, accumulated in storage order.
template <typename Tag>
auto dot(Field<Tag> const &a, Field<Tag> const &b) -> Cx
{
  if (!a.same_shape(b)) { throw Error("field shape mismatch"); }
  Cx acc{};
  for (Index i = 0; i < a.size(); ++i) { acc += std::conj(a[i]) * b[i]; }
  return acc;
}

template <typename Tag>
auto squared_norm(Field<Tag> const &a) -> double
{
  double acc = 0.0;
  for (Index i = 0; i < a.size(); ++i) { acc += std::norm(a[i]); }
  return acc;
}

template <typename Tag>
auto norm2(Field<Tag> const &a) -> double
{
  return std::sqrt(squared_norm(a));
}

template <typename Tag>
auto norm1(Field<Tag> const &a) -> double
{
  double acc = 0.0;
  for (Index i = 0; i < a.size(); ++i) { acc += std::abs(a[i]); }
  return acc;
}

template <typename Tag>
auto all_finite(Field<Tag> const &a) -> bool
{
  for (Index i = 0; i < a.size(); ++i) {
    if (!std::isfinite(a[i].real()) || !std::isfinite(a[i].imag())) { return false; }
  }
  return true;
}

// Complex per-coil weights over (v, h, c), v fastest.
class CoilSensitivities
{
public:
  CoilSensitivities() = default;
  CoilSensitivities(Index nv, Index nh, Index nc);

  auto nv() const -> Index { return nv_; }
  auto nh() const -> Index { return nh_; }
  auto coils() const -> Index { return nc_; }
  auto dims() const -> Dims { return {nv_, nh_, 1, nc_}; }
  auto size() const -> Index { return static_cast<Index>(data_.size()); }

  auto operator()(Index v, Index h, Index c) -> Cx & { return data_[v + nv_ * (h + nh_ * c)]; }
  auto operator()(Index v, Index h, Index c) const -> Cx const & { return data_[v + nv_ * (h + nh_ * c)]; }
  auto coil(Index c) const -> std::span<Cx const> { return {data_.data() + nv_ * nh_ * c, size_t(nv_ * nh_)}; }
  auto data() -> Cx * { return data_.data(); }
  auto data() const -> Cx const * { return data_.data(); }
  auto operator==(CoilSensitivities const &) const -> bool = default;

  // Throws if any entry is non-finite or any pixel has zero coil energy.
  void validate() const;

private:
  Index nv_ = 0;
  Index nh_ = 0;
  Index nc_ = 0;
  std::vector<Cx> data_;
};

// kept(v, t): whether k-space line v is measured in frame t.
class SamplingMask
{
public:
  SamplingMask() = default;
  SamplingMask(Index nv, Index nt, bool value = false);

  auto nv() const -> Index { return nv_; }
  auto nt() const -> Index { return nt_; }
  auto kept(Index v, Index t) const -> bool { return kept_[v + nv_ * t] != 0; }
  void set(Index v, Index t, bool k) { kept_[v + nv_ * t] = k ? 1 : 0; }
  auto kept_count(Index t) const -> Index;
  auto bytes() const -> std::span<std::uint8_t const> { return kept_; }
  auto operator==(SamplingMask const &) const -> bool = default;

  // Throws if some frame keeps no lines.
  void validate() const;

private:
  Index nv_ = 0;
  Index nt_ = 0;
  std::vector<std::uint8_t> kept_;
};

/*
 * Zero-filled Cartesian k-space over (v, h, c, t), v fastest. Rows (v, t) that
 * the mask marks as unsampled hold exact zeros; the mask is authoritative.
 */
class KSpaceData
{
public:
  KSpaceData() = default;
  KSpaceData(Dims const &dims, SamplingMask mask);

  auto dims() const -> Dims const & { return dims_; }
  auto mask() const -> SamplingMask const & { return mask_; }
  auto size() const -> Index { return static_cast<Index>(data_.size()); }

  auto operator()(Index v, Index h, Index c, Index t) -> Cx &
  {
    return data_[v + dims_.nv * (h + dims_.nh * (c + dims_.nc * t))];
  }
  auto operator()(Index v, Index h, Index c, Index t) const -> Cx const &
  {
    return data_[v + dims_.nv * (h + dims_.nh * (c + dims_.nc * t))];
  }
  auto operator[](Index i) -> Cx & { return data_[i]; }
  auto operator[](Index i) const -> Cx const & { return data_[i]; }
  // One (coil, frame) slice of nv*nh samples.
  auto slice(Index c, Index t) -> std::span<Cx>
  {
    return {data_.data() + dims_.pixels() * (c + dims_.nc * t), size_t(dims_.pixels())};
  }
  auto slice(Index c, Index t) const -> std::span<Cx const>
  {
    return {data_.data() + dims_.pixels() * (c + dims_.nc * t), size_t(dims_.pixels())};
  }
  auto data() -> Cx * { return data_.data(); }
  auto data() const -> Cx const * { return data_.data(); }
  auto operator==(KSpaceData const &) const -> bool = default;

  // Throws naming (v, t) of the first unsampled row holding a nonzero.
  void check_zero_fill() const;

private:
  Dims dims_;
  SamplingMask mask_;
  std::vector<Cx> data_;
};

auto squared_norm(KSpaceData const &y) -> double;

} // namespace csmri
