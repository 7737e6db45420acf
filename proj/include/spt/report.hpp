#pragma once

#include "spt/arbitrage.hpp"
#include "spt/ingest.hpp"

#include <json.hpp>

namespace spt {

using Json = nlohmann::ordered_json;

Json to_json(const ArbVerdict& v);
Json to_json(const IdentityCheck& c);
Json to_json(const MartingaleReport& m);
Json to_json(const HittingStats& h);
Json to_json(const HorizonReport& h);
Json to_json(const MonotoneVerdict& v);
/// {total, eta_hat, slope_check{eta, holds, first_violation, max_violation}}
Json to_json(const EmpiricalGammaH& e);

}  // namespace spt
