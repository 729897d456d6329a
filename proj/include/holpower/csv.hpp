#pragma once

#include <cstdio>
#include <ostream>
#include <string>
#include <vector>

#include "holpower/analytics.hpp"
#include "holpower/dp.hpp"
#include "holpower/simulate.hpp"

namespace holpower {

/// Canonical float formatting for every CSV surface: 12 significant digits,
/// shortest form. Keeps outputs byte-stable across runs.
inline std::string fmt12(double x) {
  char buf[48];
  std::snprintf(buf, sizeof(buf), "%.12g", x);
  return buf;
}

/// Interference states print 1-based everywhere outside the library.
inline void write_value_table_csv(std::ostream& out, const ValueTable& v) {
  out << "b,d,i,value\n";
  for (long b = 0; b <= v.B; ++b)
    for (int d = 1; d <= v.D; ++d)
      for (int i = 0; i < v.I; ++i)
        out << b << ',' << d << ',' << (i + 1) << ',' << fmt12(v.at(b, d, i)) << '\n';
}

inline void write_policy_table_csv(std::ostream& out, const PolicyTable& p) {
  out << "b,d,i,power\n";
  for (long b = 1; b <= p.B; ++b)
    for (int d = 1; d <= p.D; ++d)
      for (int i = 0; i < p.I; ++i)
        out << b << ',' << d << ',' << (i + 1) << ',' << fmt12(p.power_at(b, d, i)) << '\n';
}

inline void write_sigma_csv(std::ostream& out, const SigmaTable& st, const SigmaBounds& sb) {
  out << "b,d,delta,sigma,tb0,lower,upper\n";
  for (long b = 1; b <= st.B; ++b)
    for (int d = 1; d <= st.D; ++d)
      out << b << ',' << d << ',' << fmt12(st.delta(b, d)) << ',' << fmt12(st.sigma(b, d)) << ','
          << fmt12(st.tb0(b)) << ',' << fmt12(sb.lower_at(b, d)) << ','
          << fmt12(sb.upper_at(b, d)) << '\n';
}

inline void write_envelope_csv(std::ostream& out, const ConcaveEnvelope& env, int samples,
                               double p_max) {
  out << "p,success,envelope\n";
  for (int k = 0; k <= samples; ++k) {
    const double p = p_max * static_cast<double>(k) / static_cast<double>(samples);
    out << fmt12(p) << ',' << fmt12(env.base(p, env.i_level)) << ',' << fmt12(env(p)) << '\n';
  }
}

inline void write_report_header(std::ostream& out) {
  out << "scenario,policy,sweep_value,mean_total_cost,stderr_total_cost,drop_fraction,"
         "avg_power_per_packet,mean_completion_slots,truncated_count,replications,"
         "sweep_parameter,drop_fraction_se,avg_power_per_packet_se,mean_completion_slots_se,"
         "per_replication_drop_mean,per_replication_drop_se\n";
}

inline void write_report_row(std::ostream& out, const std::string& scenario,
                             const std::string& policy, const std::string& sweep_parameter,
                             const std::string& sweep_value, const SimReport& r) {
  out << scenario << ',' << policy << ',' << sweep_value << ',' << fmt12(r.mean_total_cost) << ','
      << fmt12(r.stderr_total_cost) << ',' << fmt12(r.drop_fraction) << ','
      << fmt12(r.avg_power_per_packet) << ',' << fmt12(r.mean_completion_slots) << ','
      << r.truncated << ',' << r.replications << ',' << sweep_parameter << ','
      << fmt12(r.drop_fraction_se) << ',' << fmt12(r.avg_power_per_packet_se) << ','
      << fmt12(r.mean_completion_slots_se) << ',' << fmt12(r.per_replication_drop_mean) << ','
      << fmt12(r.per_replication_drop_se) << '\n';
}

inline void write_trajectory_log_csv(std::ostream& out, const std::vector<SlotEvent>& events) {
  out << "slot,b,d,i_observed,power,success,arrival,stage_cost\n";
  for (const auto& e : events)
    out << e.slot << ',' << e.backlog << ',' << e.residual_deadline << ','
        << (e.interference_observed + 1) << ',' << fmt12(e.power) << ',' << (e.success ? 1 : 0)
        << ',' << (e.arrival ? 1 : 0) << ',' << fmt12(e.cost) << '\n';
}

}  // namespace holpower
