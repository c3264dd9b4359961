#pragma once

#include <cstdint>
#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "beltrami/energy.hpp"
#include "beltrami/metric_search.hpp"

namespace beltrami {

using Json = nlohmann::ordered_json;

/// 64-bit FNV-1a, printed as 16 hex digits.
std::string config_hash(const std::string& canonical_config);

/// {"artifact", "format_version", "config_hash", "seed", "result"}.
Json artifact_envelope(const std::string& kind, const std::string& hash, std::uint64_t seed, Json result);

Json to_json(const Verdict& v);
Json to_json(const RegionTopology& r);
Json to_json(const NodalDomainSet& d);
Json to_json(const std::vector<EigenPair>& pairs);
Json to_json(const OrbitSummary& o);
Json to_json(const HelicitySummary& h);
Json to_json(const MemberReport& m);
Json to_json(const CertificateReport& r);
Json to_json(const OrbitReport& r);
Json to_json(const S2AuditReport& r);

CertificateReport certificate_from_json(const Json& j);

/// A,sigma,nu1,branch,components,verdict,complete,skipped
void write_sweep_csv(std::ostream& out, const std::vector<CertificateReport>& reports);

/// Mesh with a per-vertex scalar as vertex colour (blue negative, red
/// positive); the raw values follow as "# f" comment lines.
void write_scalar_obj(std::ostream& out, const TriangleMesh& mesh, const Eigen::VectorXd& values);

}  // namespace beltrami
