#include "pauserl/mdp_io.hpp"

#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>

#include "pauserl/csv.hpp"

namespace pauserl {

void write_timeline(std::ostream& out, const TimeVaryingTabularMDP& mdp) {
  const std::size_t S = mdp.num_states();
  const std::size_t A = mdp.num_actions();
  out << S << ' ' << A << ' ' << mdp.horizon() << ' ' << format_number(mdp.discount()) << ' '
      << mdp.total_time() << '\n';
  out << "@init";
  for (double p : mdp.initial_dist()) out << ' ' << format_number(p);
  out << '\n';
  for (const auto& cp : mdp.timeline()) {
    out << "@t " << cp.time << '\n';
    for (double r : cp.tables.reward.data()) out << format_number(r) << '\n';
    for (std::size_t s = 0; s < S; ++s) {
      for (std::size_t a = 0; a < A; ++a) {
        const auto row = cp.tables.next_dist(s, a);
        for (std::size_t sn = 0; sn < S; ++sn) {
          if (sn > 0) out << ' ';
          out << format_number(row[sn]);
        }
        out << '\n';
      }
    }
  }
}

namespace {

double read_double(std::istream& in, const char* what) {
  std::string token;
  if (!(in >> token)) throw std::runtime_error(std::string("timeline: missing ") + what);
  std::size_t used = 0;
  double x = 0.0;
  try {
    x = std::stod(token, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != token.size()) {
    throw std::runtime_error(std::string("timeline: bad number for ") + what + ": " + token);
  }
  return x;
}

}  // namespace

TimeVaryingTabularMDP read_timeline(std::istream& in) {
  long long S = 0, A = 0, H = 0, T = 0;
  if (!(in >> S >> A >> H)) throw std::runtime_error("timeline: bad header");
  const double gamma = read_double(in, "gamma");
  if (!(in >> T)) throw std::runtime_error("timeline: bad header");
  if (S <= 0 || A <= 0) throw std::runtime_error("timeline: nonpositive sizes");
  const auto nS = static_cast<std::size_t>(S);
  const auto nA = static_cast<std::size_t>(A);

  std::vector<double> init(nS, 1.0 / static_cast<double>(nS));
  std::vector<ChangePoint> timeline;
  std::string tag;
  while (in >> tag) {
    if (tag == "@init") {
      for (auto& p : init) p = read_double(in, "initial distribution");
    } else if (tag == "@t") {
      int time = 0;
      if (!(in >> time)) throw std::runtime_error("timeline: bad change time");
      MdpTables tables = MdpTables::zeros(nS, nA);
      for (double& r : tables.reward.data()) r = read_double(in, "reward");
      for (double& p : tables.transition) p = read_double(in, "transition");
      timeline.push_back({time, std::move(tables)});
    } else {
      throw std::runtime_error("timeline: unexpected token " + tag);
    }
  }
  return TimeVaryingTabularMDP(nS, nA, static_cast<int>(H), gamma, static_cast<int>(T),
                               std::move(init), std::move(timeline));
}

}  // namespace pauserl
