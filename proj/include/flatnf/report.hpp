#pragma once
#include <string>

#include "json.hpp"

#include "flatnf/parameterize.hpp"
#include "flatnf/sequences.hpp"

namespace flatnf {

// Reports keep a fixed key set; sections a command does not produce stay null. Key and
// array orders are fixed by construction, so serialization is byte-deterministic.
using Json = nlohmann::ordered_json;

Json empty_report(const DiscreteSystem& sys, const Options& opt);
Json system_json(const DiscreteSystem& sys);
Json distribution_json(const Distribution& d);
Json sequences_json(const SequenceResult& seq);
Json change_json(const CoordChange& ch);
Json zpartition_json(const TriangularForm& tf);
Json normal_form_json(const TriangularForm& tf);
Json parameterization_json(const Parameterization& p);
Json checks_json(const std::vector<ParamCheck>& checks);

// Human-oriented deterministic rendering of a report.
std::string render_text(const Json& report);

}  // namespace flatnf
