#include "relpush/history.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "relpush/error.hpp"

namespace relpush {

simd::Lane to_lane(const Vec3& v) { return simd::Lane{{v.x, v.y, v.z, 0.0}}; }
Vec3 from_lane(const simd::Lane& l) { return {l.v[0], l.v[1], l.v[2]}; }

StateHistory::StateHistory(std::size_t capacity, double dt)
    : cap_(capacity), dt_(dt), r_(2 * capacity), u_(2 * capacity), a_(2 * capacity),
      v_(2 * capacity), t_(capacity) {
  if (capacity == 0) throw Error(ErrorCode::Validation, "history capacity must be >= 1");
  if (!(dt > 0.0)) throw Error(ErrorCode::Validation, "history dt must be > 0");
}

void StateHistory::push(const HistoryEntry& e) {
  if (pushes_ > 0) {
    const double expected = next_time();
    const double slack = 1e-12 * dt_ + 4.0 * std::numeric_limits<double>::epsilon() * std::fabs(expected);
    if (!(std::fabs(e.state.t - expected) <= slack)) {
      std::ostringstream msg;
      msg.precision(17);
      msg << "history sample at t=" << e.state.t << " is off the dt grid (expected " << expected << ")";
      throw Error(ErrorCode::Validation, msg.str());
    }
  } else {
    t_origin_ = e.state.t;
  }
  const std::size_t s = next_;
  r_[s] = r_[s + cap_] = to_lane(e.state.r);
  u_[s] = u_[s + cap_] = to_lane(e.state.u);
  a_[s] = a_[s + cap_] = to_lane(e.a);
  v_[s] = v_[s + cap_] = to_lane(e.v);
  t_[s] = e.state.t;
  next_ = (next_ + 1) % cap_;
  if (size_ < cap_) ++size_;
  ++pushes_;
}

double StateHistory::next_time() const {
  return t_origin_ + static_cast<double>(pushes_) * dt_;
}

std::size_t StateHistory::slot(std::size_t i) const { return (next_ + cap_ - 1 - i) % cap_; }

HistoryEntry StateHistory::at(std::size_t i) const {
  if (i >= size_) throw Error(ErrorCode::Validation, "history index out of range");
  const std::size_t s = slot(i);
  return {{from_lane(r_[s]), from_lane(u_[s]), t_[s]}, from_lane(a_[s]), from_lane(v_[s])};
}

std::span<const simd::Lane> StateHistory::window(const std::vector<simd::Lane>& buf) const {
  if (!full()) throw Error(ErrorCode::HistoryNotReady, "history window requested before it is full");
  return {buf.data() + next_, cap_};
}

}  // namespace relpush
