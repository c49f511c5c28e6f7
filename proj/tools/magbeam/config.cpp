#include "config.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "magbeam/errors.hpp"

namespace magbeam::cli {

using nlohmann::json;

namespace {

constexpr double kMm = 1e-3;

[[noreturn]] void fail(const std::string& field, const std::string& what) {
    throw InputError("config: " + field + ": " + what);
}

void reject_unknown(const json& section, const std::string& name, const std::set<std::string>& allowed) {
    if (!section.is_object()) fail(name, "expected an object");
    for (const auto& item : section.items()) {
        if (!allowed.contains(item.key())) {
            fail(name.empty() ? item.key() : name + "." + item.key(), "unknown key");
        }
    }
}

const json& section(const json& doc, const std::string& name) {
    if (!doc.contains(name)) fail(name, "missing section");
    return doc.at(name);
}

double number(const json& sec, const std::string& sec_name, const std::string& key) {
    const std::string field = sec_name + "." + key;
    if (!sec.contains(key)) fail(field, "missing value");
    const json& v = sec.at(key);
    if (!v.is_number()) fail(field, "expected a number");
    const double d = v.get<double>();
    if (!std::isfinite(d)) fail(field, "expected a finite number");
    return d;
}

double positive(const json& sec, const std::string& sec_name, const std::string& key) {
    const double d = number(sec, sec_name, key);
    if (!(d > 0.0)) fail(sec_name + "." + key, "must be > 0");
    return d;
}

double non_negative(const json& sec, const std::string& sec_name, const std::string& key) {
    const double d = number(sec, sec_name, key);
    if (d < 0.0) fail(sec_name + "." + key, "must be >= 0");
    return d;
}

Vec3 vector3(const json& sec, const std::string& sec_name, const std::string& key) {
    const std::string field = sec_name + "." + key;
    if (!sec.contains(key)) fail(field, "missing value");
    const json& v = sec.at(key);
    if (!v.is_array() || v.size() != 3) fail(field, "expected an array of 3 numbers");
    Vec3 out;
    for (int i = 0; i < 3; ++i) {
        if (!v[static_cast<std::size_t>(i)].is_number()) fail(field, "expected an array of 3 numbers");
        out[i] = v[static_cast<std::size_t>(i)].get<double>();
    }
    if (!out.allFinite()) fail(field, "expected finite components");
    return out;
}

}  // namespace

RobotConfig parse_config(const json& doc) {
    reject_unknown(doc, "", {"robot", "tip_magnets", "external_magnet", "solver", "beam_mode"});

    RobotConfig cfg;
    cfg.document = doc;
    auto& model = cfg.model;

    const json& robot = section(doc, "robot");
    reject_unknown(robot, "robot", {"length_mm", "elastic_modulus_mpa", "tube_od_mm", "tube_id_mm", "ke"});
    const double od = positive(robot, "robot", "tube_od_mm");
    const double id = non_negative(robot, "robot", "tube_id_mm");
    if (!(od > id)) fail("robot.tube_od_mm", "must exceed robot.tube_id_mm");
    model.params.length = positive(robot, "robot", "length_mm") * kMm;
    model.params.elastic_modulus = positive(robot, "robot", "elastic_modulus_mpa") * 1e6;
    model.params.section_moment = beam::section_moment_tube(od * kMm, id * kMm);
    model.params.stiffness_scale = positive(robot, "robot", "ke");
    model.params.base_position = Vec3::Zero();

    const json& tip = section(doc, "tip_magnets");
    reject_unknown(tip, "tip_magnets", {"od_mm", "id_mm", "length_mm", "remanence_t", "separation_mm"});
    const double tip_od = positive(tip, "tip_magnets", "od_mm");
    const double tip_id = non_negative(tip, "tip_magnets", "id_mm");
    if (!(tip_od > tip_id)) fail("tip_magnets.od_mm", "must exceed tip_magnets.id_mm");
    const double tip_moment = geomag::magnet_moment_from_geometry(
        tip_od * kMm, tip_id * kMm, positive(tip, "tip_magnets", "length_mm") * kMm,
        non_negative(tip, "tip_magnets", "remanence_t"));
    model.pair = geomag::RingPairConfig::make(tip_moment, 0.0, 0.0,
                                              non_negative(tip, "tip_magnets", "separation_mm") * kMm);

    const json& ext = section(doc, "external_magnet");
    reject_unknown(ext, "external_magnet",
                   {"diameter_mm", "length_mm", "remanence_t", "position_mm", "moment_direction", "kb"});
    const double ext_moment = geomag::magnet_moment_from_geometry(
        positive(ext, "external_magnet", "diameter_mm") * kMm, 0.0,
        positive(ext, "external_magnet", "length_mm") * kMm, non_negative(ext, "external_magnet", "remanence_t"));
    const Vec3 direction = vector3(ext, "external_magnet", "moment_direction");
    if (!(direction.norm() > 0.0)) fail("external_magnet.moment_direction", "must be nonzero");
    model.source.moment = ext_moment * direction.normalized();
    model.source.position = vector3(ext, "external_magnet", "position_mm") * kMm;
    model.cal.k_b = ext.contains("kb") ? positive(ext, "external_magnet", "kb") : 1.0;

    const json& solver = section(doc, "solver");
    reject_unknown(solver, "solver", {"tolerance_mm", "max_iterations", "relaxation"});
    cfg.settings.position_tolerance = positive(solver, "solver", "tolerance_mm") * kMm;
    const double iterations = positive(solver, "solver", "max_iterations");
    if (iterations != std::floor(iterations)) fail("solver.max_iterations", "must be an integer");
    cfg.settings.max_iterations = static_cast<int>(iterations);
    cfg.settings.relaxation = positive(solver, "solver", "relaxation");
    if (cfg.settings.relaxation > 1.0) fail("solver.relaxation", "must be in (0, 1]");

    if (doc.contains("beam_mode")) {
        const json& mode = doc.at("beam_mode");
        if (!mode.is_string()) fail("beam_mode", "expected \"corrected\" or \"paper_literal\"");
        try {
            model.mode = beam::formulation_from_string(mode.get<std::string>());
        } catch (const ContractViolation&) {
            fail("beam_mode", "expected \"corrected\" or \"paper_literal\"");
        }
    }
    return cfg;
}

RobotConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw InputError("config: cannot open '" + path.string() + "'");
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::parse_error& e) {
        throw InputError("config: " + path.string() + ": " + e.what());
    }
    return parse_config(doc);
}

}  // namespace magbeam::cli
