#include <doctest.h>

#include <cmath>

#include "accsim/lowlevel.hpp"

using namespace accsim;

namespace {

ControllerConfig basic() {
  ControllerConfig c;
  c.a_max = 2.0;
  c.a_min = -3.5;
  c.overshoot_allowance = 2.0;
  return c;
}

}  // namespace

TEST_CASE("algorithm 1: rate-limited ascent") {
  PidState s;
  s.v_pid = 9.95;
  ControllerConfig c = basic();
  CHECK(step_vpid_linear(s, 10.0, 9.95, c, 0.01) == doctest::Approx(9.97));
  CHECK(s.v_pid == doctest::Approx(9.97));
}

TEST_CASE("algorithm 1: lands on the target when within reach") {
  PidState s;
  s.v_pid = 9.97;
  ControllerConfig c = basic();
  CHECK(step_vpid_linear(s, 9.96, 9.97, c, 0.01) == doctest::Approx(9.96));
}

TEST_CASE("algorithm 1: high-side snap-back to the allowance band") {
  PidState s;
  s.v_pid = 15.0;
  ControllerConfig c = basic();
  // v_pid > v_ego + oa (15 > 14) and target below: snap to max(10, 14) = 14,
  // then rate-limit downward one tick.
  const double out = step_vpid_linear(s, 10.0, 12.0, c, 0.01);
  CHECK(out == doctest::Approx(14.0 + c.a_min * 0.01));
  CHECK(out < 14.0);
}

TEST_CASE("algorithm 1: snap-back lands on the target when it is nearer") {
  PidState s;
  s.v_pid = 15.0;
  ControllerConfig c = basic();
  // Target 14.5 sits inside [v_ego+oa, v_pid): max(14.5, 14) = 14.5.
  const double out = step_vpid_linear(s, 14.5, 12.0, c, 0.01);
  CHECK(out == doctest::Approx(14.5));
}

TEST_CASE("algorithm 1: low-side snap-back mirrors the high side") {
  PidState s;
  s.v_pid = 9.0;
  ControllerConfig c = basic();
  // v_pid < v_ego - oa (9 < 10) and target above: snap to min(v_target, 10).
  const double out = step_vpid_linear(s, 13.0, 12.0, c, 0.01);
  CHECK(out == doctest::Approx(10.0 + c.a_max * 0.01));
}

TEST_CASE("algorithm 1: no movement when already on target") {
  PidState s;
  s.v_pid = 11.0;
  ControllerConfig c = basic();
  CHECK(step_vpid_linear(s, 11.0, 11.0, c, 0.01) == 11.0);
}

TEST_CASE("algorithm 1 safety envelope without snap-back") {
  ControllerConfig c = basic();
  PidState s;
  s.v_pid = 10.0;
  const double dt = 0.01;
  double prev = s.v_pid;
  for (int i = 0; i < 500; ++i) {
    const double target = 10.0 + 3.0 * std::sin(i * 0.05);
    // Keep v_ego glued to v_pid so the snap-back never fires.
    step_vpid_linear(s, target, s.v_pid, c, dt);
    CHECK(std::abs(s.v_pid - prev) <=
          std::max(c.a_max, std::abs(c.a_min)) * dt + 1e-12);
    prev = s.v_pid;
  }
}

TEST_CASE("algorithm 2: left endpoint returns the anchors") {
  TimingConfig timing;
  PidState s;
  StartState start{12.0, 0.4};
  step_setpoints_mpc(s, start, 1.0, 3.0, 3.0, timing);
  CHECK(s.a_pid == doctest::Approx(0.4));
  CHECK(s.v_pid == doctest::Approx(12.0));
}

TEST_CASE("algorithm 2: one horizon step out reaches a_target") {
  TimingConfig timing;  // horizon_dt = 0.2
  PidState s;
  StartState start{12.0, 0.4};
  step_setpoints_mpc(s, start, 1.0, 3.0, 3.2, timing);
  CHECK(s.a_pid == doctest::Approx(1.0));
  // Trapezoid over the full ramp: v + 0.2*(1.0+0.4)/2.
  CHECK(s.v_pid == doctest::Approx(12.0 + 0.2 * 0.7));
}

TEST_CASE("algorithm 2: interior interpolation, hand-evaluated") {
  TimingConfig timing;
  PidState s;
  StartState start{7.0, 0.0};
  // dt = 0.05: a_pid = 0 + 0.05*(1-0)/0.2 = 0.25; v_pid = 7 + 0.05*0.125.
  step_setpoints_mpc(s, start, 1.0, 10.0, 10.05, timing);
  CHECK(s.a_pid == doctest::Approx(0.25));
  CHECK(s.v_pid == doctest::Approx(7.00625));
}

TEST_CASE("algorithm 2: a_pid is affine in dt, v_pid its exact trapezoid") {
  TimingConfig timing;
  StartState start{15.0, -0.6};
  const double a_target = 0.9;
  const double slope = (a_target - start.a_start) / timing.horizon_dt;
  for (double dt : {0.0, 0.01, 0.02, 0.03, 0.04, 0.05}) {
    PidState s;
    step_setpoints_mpc(s, start, a_target, 20.0, 20.0 + dt, timing);
    CHECK(s.a_pid == doctest::Approx(start.a_start + slope * dt).epsilon(1e-12));
    CHECK(s.v_pid ==
          doctest::Approx(start.v_start + dt * (s.a_pid + start.a_start) / 2.0)
              .epsilon(1e-12));
  }
}

TEST_CASE("pif control: null input yields zero") {
  PidState s;
  ControllerConfig c = basic();
  const ControlTerms t = pif_control(s, 0.0, c, 0.01);
  CHECK(t.control == 0.0);
  CHECK(t.p == 0.0);
  CHECK(t.i == 0.0);
  CHECK(t.f == 0.0);
}

TEST_CASE("pif control: hand-evaluated P+F combination") {
  PidState s;
  s.v_pid = 10.5;
  s.a_pid = 0.2;
  ControllerConfig c = basic();
  c.kp = GainSchedule(1.0);
  c.ki = GainSchedule(0.0);
  c.kf = GainSchedule(1.0);
  const ControlTerms t = pif_control(s, 10.0, c, 0.01);
  CHECK(t.p == doctest::Approx(0.5));
  CHECK(t.f == doctest::Approx(0.2));
  CHECK(t.control == doctest::Approx(0.7));
}

TEST_CASE("pif control: rectangular integral accumulates e*dt") {
  PidState s;
  s.v_pid = 11.0;
  ControllerConfig c = basic();
  c.kp = GainSchedule(0.0);
  c.ki = GainSchedule(2.0);
  for (int i = 1; i <= 10; ++i) {
    const ControlTerms t = pif_control(s, 10.0, c, 0.01);
    CHECK(s.integral == doctest::Approx(0.01 * i));
    CHECK(t.i == doctest::Approx(2.0 * 0.01 * i));
  }
}

TEST_CASE("pif control: clamp antiwindup holds the integral at the limit") {
  PidState s;
  s.v_pid = 12.0;
  ControllerConfig c = basic();
  c.ki = GainSchedule(1.0);
  c.antiwindup.mode = AntiWindupMode::kClamp;
  c.antiwindup.limit = 1.0;
  // Error 2 m/s for 70 ticks of 0.01 s would integrate to 1.4 without the
  // clamp; it must hold at 1.0.
  for (int i = 0; i < 70; ++i) pif_control(s, 10.0, c, 0.01);
  CHECK(s.integral == doctest::Approx(1.0));
}

TEST_CASE("pif control: freeze antiwindup stops integrating in saturation") {
  ControllerConfig c = basic();
  c.kp = GainSchedule(5.0);
  c.ki = GainSchedule(1.0);
  c.antiwindup.mode = AntiWindupMode::kFreeze;

  PidState s;
  s.v_pid = 11.0;
  // First call: last_control = 0, integral accumulates.
  pif_control(s, 10.0, c, 0.01);
  const double after_first = s.integral;
  CHECK(after_first == doctest::Approx(0.01));
  // Now last_control = 5.01 > a_max = 2 and the error still pushes up:
  // the integral must hold.
  pif_control(s, 10.0, c, 0.01);
  CHECK(s.integral == after_first);
  // Error flips sign: integration resumes (now unwinding).
  s.v_pid = 9.0;
  pif_control(s, 10.0, c, 0.01);
  CHECK(s.integral == doctest::Approx(after_first - 0.01));
}

TEST_CASE("pif control: deadzone zeroes small errors for P and I alike") {
  ControllerConfig c = basic();
  c.kp = GainSchedule(1.0);
  c.ki = GainSchedule(1.0);
  c.deadzone = 0.1;

  PidState s;
  s.v_pid = 10.05;
  const ControlTerms t = pif_control(s, 10.0, c, 0.01);
  CHECK(t.p == 0.0);
  CHECK(s.integral == 0.0);
  // Outside the deadzone the full error acts.
  s.v_pid = 10.2;
  const ControlTerms t2 = pif_control(s, 10.0, c, 0.01);
  CHECK(t2.p == doctest::Approx(0.2));
}

TEST_CASE("windup precondition: with no antiwindup, I eventually beats P") {
  ControllerConfig c = basic();
  c.kp = GainSchedule(1.0);
  c.ki = GainSchedule(0.33);
  // Sustained 1 m/s error: |I| = 0.33*t grows past |P| = 1 after ~3 s.
  PidState s;
  s.v_pid = 11.0;
  bool i_beat_p = false;
  for (int i = 0; i < 500; ++i) {
    const ControlTerms t = pif_control(s, 10.0, c, 0.01);
    if (std::abs(t.i) > std::abs(t.p)) {
      i_beat_p = true;
      break;
    }
  }
  CHECK(i_beat_p);
}

TEST_CASE("gains are evaluated at the ego speed") {
  ControllerConfig c = basic();
  c.kp = GainSchedule(std::vector<std::pair<double, double>>{{0.0, 2.0}, {20.0, 1.0}});
  PidState s;
  s.v_pid = 11.0;
  const ControlTerms t = pif_control(s, 10.0, c, 0.01);
  // kp(10) interpolates to 1.5.
  CHECK(t.p == doctest::Approx(1.5));
}
