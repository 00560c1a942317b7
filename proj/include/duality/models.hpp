#pragma once

#include <memory>
#include <string>

#include "duality/models/barotropic.hpp"
#include "duality/models/burgers.hpp"
#include "duality/models/korteweg.hpp"
#include "duality/models/qhd.hpp"

namespace duality {

// Options consumed by the factory; fields irrelevant to the chosen model are
// ignored.
struct ModelSpec {
    std::string name = "burgers";
    std::string energy = "ylogy";  // "ylogy" or "power" (barotropic, qhd)
    double power_coef = 0.5;
    double power_sigma = 2.0;
    double korteweg_s = -0.5;
};

inline EnergyFunction make_energy(const ModelSpec& spec) {
    if (spec.energy == "ylogy") return EnergyFunction::make_ylogy();
    if (spec.energy == "power")
        return EnergyFunction::make_power(spec.power_coef, spec.power_sigma);
    throw ConfigError("unknown energy kind '" + spec.energy +
                      "' (expected ylogy or power)");
}

inline std::unique_ptr<Model> make_model(const ModelSpec& spec) {
    if (spec.name == "burgers") return std::make_unique<BurgersModel>();
    if (spec.name == "barotropic")
        return std::make_unique<BarotropicModel>(make_energy(spec));
    if (spec.name == "qhd") return std::make_unique<QhdModel>(make_energy(spec));
    if (spec.name == "korteweg")
        return std::make_unique<KortewegModel>(spec.korteweg_s);
    throw ConfigError("unknown model '" + spec.name +
                      "' (expected burgers, barotropic, qhd, or korteweg)");
}

inline std::unique_ptr<Model> make_model(const std::string& name) {
    ModelSpec spec;
    spec.name = name;
    return make_model(spec);
}

}  // namespace duality
