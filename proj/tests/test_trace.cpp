#include <doctest.h>

#include <sstream>
#include <string>

#include "accsim/trace.hpp"

using namespace accsim;

namespace {

PlatoonTrace sample_trace() {
  PlatoonTrace tr;
  tr.timing.duration = 0.03;
  tr.vehicle_count = 2;
  for (int tick = 0; tick < 3; ++tick) {
    const double t = tick * 0.01;
    TickRecord lead;
    lead.t = t;
    lead.vehicle = 0;
    lead.state = {100.0 + tick, 20.0, 0.0};
    tr.records.push_back(lead);

    TickRecord f;
    f.t = t;
    f.vehicle = 1;
    f.state = {68.0 + tick, 19.87654321 + tick, -0.25};
    f.v_target = 19.5;
    f.v_pid = 19.9;
    f.p_term = 0.1;
    f.i_term = 0.01;
    f.f_term = 0.0;
    f.control = 0.108;
    f.gb = 0.036;
    tr.records.push_back(f);
  }
  return tr;
}

}  // namespace

TEST_CASE("csv header is the fixed column list") {
  std::ostringstream out;
  write_trace_csv(sample_trace(), out);
  const std::string text = out.str();
  CHECK(text.rfind("t,vehicle_id,x,v,a,v_target,a_target,v_pid,a_pid,"
                   "p_term,i_term,f_term,control,gb\n", 0) == 0);
}

TEST_CASE("absent fields serialize as empty cells") {
  std::ostringstream out;
  write_trace_csv(sample_trace(), out);
  std::istringstream in(out.str());
  std::string line;
  std::getline(in, line);  // header
  std::getline(in, line);  // lead row at t=0
  // Lead logs only t, id, x, v, a: nine empty planner/controller cells.
  CHECK(line == "0,0,100,20,0,,,,,,,,,");
}

TEST_CASE("round-trip is exact for values within 12 significant digits") {
  const PlatoonTrace tr = sample_trace();
  std::ostringstream out;
  write_trace_csv(tr, out);
  std::istringstream in(out.str());
  const PlatoonTrace back = read_trace_csv(in, tr.timing.plan_dt, tr.timing.horizon_dt);

  REQUIRE(back.vehicle_count == 2);
  REQUIRE(back.tick_count() == 3);
  for (int tick = 0; tick < 3; ++tick) {
    for (int v = 0; v < 2; ++v) {
      const TickRecord& a = tr.at(tick, v);
      const TickRecord& b = back.at(tick, v);
      CHECK(a.t == b.t);
      CHECK(a.state.x == b.state.x);
      CHECK(a.state.v == b.state.v);  // 12 significant digits survive
      CHECK(a.state.a == b.state.a);
      CHECK(a.v_target == b.v_target);
      CHECK(a.a_target == b.a_target);
      CHECK(a.v_pid == b.v_pid);
      CHECK(a.p_term == b.p_term);
      CHECK(a.control == b.control);
      CHECK(a.gb == b.gb);
    }
  }
}

TEST_CASE("reader recovers control_dt from the tick spacing") {
  std::ostringstream out;
  write_trace_csv(sample_trace(), out);
  std::istringstream in(out.str());
  const PlatoonTrace back = read_trace_csv(in);
  CHECK(back.timing.control_dt == doctest::Approx(0.01));
}

TEST_CASE("reader rejects a malformed header") {
  std::istringstream in("time,vehicle,x\n0,0,1\n");
  CHECK_THROWS_AS(read_trace_csv(in), TraceError);
}

TEST_CASE("reader rejects rows with the wrong number of columns") {
  std::istringstream in(
      "t,vehicle_id,x,v,a,v_target,a_target,v_pid,a_pid,p_term,i_term,f_term,control,gb\n"
      "0,0,1,2\n");
  CHECK_THROWS_AS(read_trace_csv(in), TraceError);
}

TEST_CASE("reader rejects an empty file") {
  std::istringstream in("");
  CHECK_THROWS_AS(read_trace_csv(in), TraceError);
}

TEST_CASE("floats are written with 12 significant digits") {
  PlatoonTrace tr;
  tr.vehicle_count = 1;
  TickRecord r;
  r.t = 0.0;
  r.vehicle = 0;
  r.state = {1.0 / 3.0, 2.0 / 3.0, 0.0};
  tr.records.push_back(r);
  std::ostringstream out;
  write_trace_csv(tr, out);
  CHECK(out.str().find("0.333333333333") != std::string::npos);
  CHECK(out.str().find("0.666666666667") != std::string::npos);
}
