// File formats. Instances, latent instances, bounds and bound reports are JSON;
// logs, traces, aggregates and heatmaps are CSV with fixed column names.
#pragma once

#include <iosfwd>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "banditlab/analysis.hpp"
#include "banditlab/core.hpp"
#include "banditlab/simulator.hpp"
#include "banditlab/transfer.hpp"

namespace banditlab {

/// Unreadable or unwritable file. The CLI maps it to exit code 3.
class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

std::string read_text(const std::string& path);
void write_text(const std::string& path, const std::string& text);

// {"support": {"a", "b"}, "arms": [{"mean", "dist": {"kind", "scale"}, "lower", "upper"}]}
// Missing bounds default to the support; a missing dist is Bernoulli.
BanditInstance parse_instance(const std::string& json_text);
std::string dump_instance(const BanditInstance& instance);
BanditInstance load_instance(const std::string& path);

// {"contexts_visible": [...], "contexts_hidden": [...], "p_u_given_z": [z][u],
//  "means": [k][z][u], optional "z_weights": [z]}
LatentInstance parse_latent(const std::string& json_text);
std::string dump_latent(const LatentInstance& latent);
LatentInstance load_latent(const std::string& path);

// z,k,y with 0-based integer ids.
std::vector<LogRecord> parse_log_csv(const std::string& text);
std::string dump_log_csv(const std::vector<LogRecord>& records);

// {"<z name>": [{"lower", "upper", "failure_prob"}, ...], ...} in context order.
std::string dump_transferred(const TransferredBounds& bounds, const std::vector<std::string>& context_names);
/// Reads bounds for the given context names, in that order.
TransferredBounds parse_transferred(const std::string& json_text, const std::vector<std::string>& context_names);

// policy,seed,checkpoint,cum_regret  (z column prepended when contextual)
std::string trace_csv(const std::vector<RegretTrace>& traces, bool with_context = false);
// policy,checkpoint,mean,stderr,q_lo,q_hi  (z column prepended when contextual)
std::string aggregate_csv(const std::vector<PolicyAggregate>& aggregates,
                          const std::vector<std::size_t>& contexts = {});

// mu1,mu2,ratio  (ratio empty for unevaluated cells)
std::string heatmap_csv(const std::vector<HeatmapCell>& cells);

std::string bound_report_json(const std::vector<BoundReport>& reports);

/// Shortest round-trip decimal form.
std::string format_double(double x);

}  // namespace banditlab
