#include "smlmc/registry.hpp"

#include "smlmc/errors.hpp"

namespace smlmc {

namespace {

ConditionParams make(std::string id, Modality modality, double density, double mu_off,
                     std::int64_t frames, Termination termination) {
    ConditionParams p;
    p.id = std::move(id);
    p.modality = modality;
    p.density_per_um2 = density;
    p.mu_on_frames = 5.0;
    p.mu_off_frames = mu_off;
    p.max_frames = frames;
    p.termination = termination;
    p.validate();
    return p;
}

std::map<std::string, ConditionParams> build_registry() {
    using M = Modality;
    std::map<std::string, ConditionParams> r;
    auto add = [&r](ConditionParams p) { r.emplace(p.id, std::move(p)); };
    add(make("D1", M::dSTORM, 50, 100, 6305, ExponentialLocalizations{20}));
    add(make("D2", M::dSTORM, 50, 100, 10000, ExponentialLocalizations{50}));
    add(make("D3", M::dSTORM, 50, 1000, 10000, ExponentialLocalizations{20}));
    add(make("D4", M::dSTORM, 50, 1000, 10000, ExponentialLocalizations{50}));
    add(make("D5", M::dSTORM, 1000, 1000, 10000, ExponentialLocalizations{20}));
    add(make("D6", M::dSTORM, 1000, 1000, 10000, ExponentialLocalizations{50}));
    add(make("P1", M::DnaPaint, 50, 100, 4583, PoissonBindings{50}));
    add(make("P2", M::DnaPaint, 50, 100, 10000, Unlimited{}));
    add(make("P3", M::DnaPaint, 50, 1000, 10000, Unlimited{}));
    add(make("P4", M::DnaPaint, 1000, 1000, 10000, Unlimited{}));
    return r;
}

}  // namespace

const std::map<std::string, ConditionParams>& condition_registry() {
    static const std::map<std::string, ConditionParams> registry = build_registry();
    return registry;
}

const ConditionParams& find_condition(const std::string& id) {
    const auto& reg = condition_registry();
    auto it = reg.find(id);
    if (it == reg.end()) {
        throw InvalidArgument("unknown condition '" + id + "' (expected D1-D6 or P1-P4)");
    }
    return it->second;
}

}  // namespace smlmc
