#include "accsim/trace.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <sstream>
#include <string>

namespace accsim {
namespace {

constexpr const char* kHeader =
    "t,vehicle_id,x,v,a,v_target,a_target,v_pid,a_pid,p_term,i_term,f_term,control,gb";

void append_number(std::string& row, double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  row += buf;
}

void append_field(std::string& row, const std::optional<double>& v) {
  row += ',';
  if (v) append_number(row, *v);
}

// Splits one CSV line into optional doubles; empty cells stay empty.
std::vector<std::optional<double>> split_row(const std::string& line, std::size_t lineno) {
  std::vector<std::optional<double>> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t end = line.find(',', start);
    std::string cell = line.substr(start, end == std::string::npos ? end : end - start);
    if (!cell.empty() && cell.back() == '\r') cell.pop_back();
    if (cell.empty()) {
      out.emplace_back();
    } else {
      try {
        std::size_t used = 0;
        const double v = std::stod(cell, &used);
        if (used != cell.size()) throw std::invalid_argument(cell);
        out.emplace_back(v);
      } catch (const std::exception&) {
        throw TraceError("trace CSV line " + std::to_string(lineno) +
                         ": bad numeric cell \"" + cell + "\"");
      }
    }
    if (end == std::string::npos) break;
    start = end + 1;
  }
  return out;
}

}  // namespace

void write_trace_csv(const PlatoonTrace& trace, std::ostream& out) {
  out << kHeader << '\n';
  std::string row;
  for (const TickRecord& r : trace.records) {
    row.clear();
    append_number(row, r.t);
    row += ',';
    row += std::to_string(r.vehicle);
    row += ',';
    append_number(row, r.state.x);
    row += ',';
    append_number(row, r.state.v);
    row += ',';
    append_number(row, r.state.a);
    append_field(row, r.v_target);
    append_field(row, r.a_target);
    append_field(row, r.v_pid);
    append_field(row, r.a_pid);
    append_field(row, r.p_term);
    append_field(row, r.i_term);
    append_field(row, r.f_term);
    append_field(row, r.control);
    append_field(row, r.gb);
    row += '\n';
    out << row;
  }
}

void write_trace_csv(const PlatoonTrace& trace, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw TraceError("cannot open trace file for writing: " + path.string());
  write_trace_csv(trace, out);
}

PlatoonTrace read_trace_csv(std::istream& in, double plan_dt, double horizon_dt) {
  std::string line;
  if (!std::getline(in, line)) throw TraceError("trace CSV: empty input");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != kHeader) {
    throw TraceError("trace CSV: unexpected header \"" + line + "\"");
  }
  PlatoonTrace trace;
  trace.timing.plan_dt = plan_dt;
  trace.timing.horizon_dt = horizon_dt;

  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line == "\r") continue;
    const auto cells = split_row(line, lineno);
    if (cells.size() != 14) {
      throw TraceError("trace CSV line " + std::to_string(lineno) + ": expected 14 columns, got " +
                       std::to_string(cells.size()));
    }
    for (int c = 0; c < 5; ++c) {
      if (!cells[c]) {
        throw TraceError("trace CSV line " + std::to_string(lineno) +
                         ": t/vehicle_id/x/v/a must not be empty");
      }
    }
    TickRecord r;
    r.t = *cells[0];
    r.vehicle = static_cast<int>(std::lround(*cells[1]));
    r.state.x = *cells[2];
    r.state.v = *cells[3];
    r.state.a = *cells[4];
    r.v_target = cells[5];
    r.a_target = cells[6];
    r.v_pid = cells[7];
    r.a_pid = cells[8];
    r.p_term = cells[9];
    r.i_term = cells[10];
    r.f_term = cells[11];
    r.control = cells[12];
    r.gb = cells[13];
    trace.records.push_back(r);
  }
  if (trace.records.empty()) throw TraceError("trace CSV: no data rows");

  // Recover the layout: rows sharing the first timestamp form one tick.
  const double t0 = trace.records.front().t;
  int count = 0;
  for (const TickRecord& r : trace.records) {
    if (r.t != t0) break;
    ++count;
  }
  trace.vehicle_count = count;
  if (count < 1 || trace.records.size() % count != 0) {
    throw TraceError("trace CSV: inconsistent rows per tick");
  }
  const int ticks = static_cast<int>(trace.records.size()) / count;
  if (ticks > 1) {
    trace.timing.control_dt = trace.at(1, 0).t - t0;
  }
  trace.timing.duration = ticks * trace.timing.control_dt;
  return trace;
}

PlatoonTrace read_trace_csv(const std::filesystem::path& path, double plan_dt,
                            double horizon_dt) {
  std::ifstream in(path);
  if (!in) throw TraceError("cannot open trace file: " + path.string());
  return read_trace_csv(in, plan_dt, horizon_dt);
}

}  // namespace accsim
