#pragma once

#include <iosfwd>
#include <string>

#include "json.hpp"
#include "mmot/clustering.hpp"
#include "mmot/core.hpp"
#include "mmot/hash.hpp"
#include "mmot/metric_props.hpp"
#include "mmot/transport.hpp"

namespace mmot::io {

using nlohmann::json;

// %.17g: enough digits to round-trip any double.
std::string format_double(double v);

// First line `atom_kind,<scalar|planar|label>`, then `x,mass`, `x,y,mass`
// or `name,mass` per atom.
void write_distribution(std::ostream& out, const DiscreteDistribution& d);
DiscreteDistribution read_distribution(std::istream& in);

json to_json(const JointMass& j);
JointMass joint_from_json(const json& j);
json to_json(const TransportResult& r, bool with_coupling);
json to_json(const MetricReport& r, std::size_t max_violations = 50);
json to_json(const ClusteringSolution& s);
json to_json(const hash::HashAudit& a);

// Rows: predicted label, columns: true label; both over sorted label ids.
void write_confusion_csv(std::ostream& out, const std::vector<std::size_t>& pred,
                         const std::vector<std::size_t>& truth);

std::string read_file(const std::string& path);
// Writes atomically enough for our purposes: truncate and write.
void write_file(const std::string& path, const std::string& contents);

}  // namespace mmot::io
