#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "relpush/kinematics.hpp"
#include "relpush/simd/stencil.hpp"

namespace relpush {

struct HistoryEntry {
  ParticleState state;
  Vec3 a;  // du/dt at state
  Vec3 v;  // dr/dt at state
};

// Fixed-capacity ring of the most recent samples on a uniform time grid.
// Storage is mirrored (each slot written twice) so the last `capacity`
// samples are always one contiguous oldest-first run, which is what the
// stencil kernels consume.
class StateHistory {
 public:
  StateHistory(std::size_t capacity, double dt);

  void push(const HistoryEntry& e);

  std::size_t size() const { return size_; }
  std::size_t capacity() const { return cap_; }
  bool full() const { return size_ == cap_; }
  double dt() const { return dt_; }

  // Grid time of the next sample: first pushed time + (pushes so far) * dt.
  double next_time() const;

  // i = 0 is the newest sample.
  HistoryEntry at(std::size_t i) const;
  HistoryEntry newest() const { return at(0); }

  // Oldest-first windows over all stored samples; require full().
  std::span<const simd::Lane> r_window() const { return window(r_); }
  std::span<const simd::Lane> u_window() const { return window(u_); }
  std::span<const simd::Lane> a_window() const { return window(a_); }
  std::span<const simd::Lane> v_window() const { return window(v_); }

 private:
  std::span<const simd::Lane> window(const std::vector<simd::Lane>& buf) const;
  std::size_t slot(std::size_t i) const;

  std::size_t cap_;
  double dt_;
  std::size_t size_ = 0;
  std::size_t next_ = 0;  // slot the next push writes
  std::size_t pushes_ = 0;
  double t_origin_ = 0.0;
  std::vector<simd::Lane> r_, u_, a_, v_;
  std::vector<double> t_;
};

simd::Lane to_lane(const Vec3& v);
Vec3 from_lane(const simd::Lane& l);

}  // namespace relpush
