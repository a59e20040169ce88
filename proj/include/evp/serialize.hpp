#pragma once

// JSON and CSV forms of the library's records.

#include "evp/arithmetic.hpp"
#include "evp/cohomology.hpp"
#include "evp/environment.hpp"
#include "evp/geomsum.hpp"
#include "evp/liouville.hpp"
#include "evp/periodic.hpp"
#include "evp/poisson.hpp"
#include "evp/walk.hpp"
#include "evp/walk_extended.hpp"

#include <json.hpp>

#include <ostream>
#include <string>
#include <vector>

namespace evp {

using Json = nlohmann::ordered_json;

/// {"degree": K, "coefficients": [[re, im], ...]} ordered k = -K..K.
Json to_json(const PeriodicFunction& f);
/// Throws SchemaViolation on missing or unknown keys and wrong shapes.
PeriodicFunction function_from_json(const Json& j);

Json to_json(const RotationNumber& rot);
Json to_json(const DiophantineProfile& profile);
Json to_json(const LiouvilleSchedule& schedule);
Json to_json(const SolveReport& report);
Json to_json(const Environment& env);
Json to_json(const InvariantDensity& density);
Json to_json(const PoissonCertificate& cert);
Json to_json(const MixingCurve& curve);
Json to_json(const CltResult& result);
Json to_json(const DeltaTable& table);
Json to_json(const LltReport& report);
Json to_json(const TailFit& fit);
Json to_json(const CharModulus& modulus);
Json to_json(const LemmaCertificate& cert);
Json to_json(const StageRecord& stage);
Json to_json(const SmoothnessProxy& proxy);
Json to_json(const LiouvilleObservable& obs);
Json to_json(const WitnessRow& row);

/// Shortest text that reads back to the same double; "nan", "inf", "-inf".
std::string format_number(double v);

/// Rectangular table with one unit per column.
struct CsvTable {
    std::vector<std::string> columns;
    std::vector<std::string> units;
    std::vector<std::vector<std::string>> rows;

    void add_row(std::vector<std::string> row);
};

/// RFC 4180 field quoting.
std::string csv_field(const std::string& s);

/// Writes "# manifest sha256=<digest>", "# units,<unit>,...", the header and
/// the rows, with CRLF line ends.
void write_csv(std::ostream& out, const CsvTable& table, const std::string& manifest_digest);

}  // namespace evp
