#include "hybisim/mapped_system.hpp"

#include <algorithm>
#include <cstring>
#include <limits>

#include "hybisim/errors.hpp"

namespace hybisim {

MappedSystem::MappedSystem(const HybridAutomaton& h, FlowConfig cfg)
    : h_(h), cfg_(cfg) {}

std::string MappedSystem::key_of(const HybridState& s) const {
    Vec p = s.point;
    for (double& v : p)
        if (v == 0.0) v = 0.0;  // collapse -0.0 onto +0.0
    std::string key(sizeof(int) + p.size() * sizeof(double), '\0');
    std::memcpy(key.data(), &s.mode, sizeof(int));
    std::memcpy(key.data() + sizeof(int), p.data(), p.size() * sizeof(double));
    return key;
}

int MappedSystem::intern(const HybridState& s) {
    if (s.mode < 0 || s.mode >= static_cast<int>(h_.modes.size()))
        throw EngineError("state references an unknown mode");
    if (s.point.size() != h_.variables.size())
        throw EngineError("state dimension does not match the model");
    auto [it, fresh] = intern_index_.try_emplace(key_of(s), state_count());
    if (fresh) states_.push_back(s);
    return it->second;
}

const std::string& MappedSystem::output_of(int id) const {
    return h_.modes[states_[id].mode].output;
}

std::vector<int> MappedSystem::enabled_edges(int id) {
    // Membership is tested two orders of magnitude looser than the event
    // localization so that flow landings sit robustly on the guards they
    // were driven onto, tangential grazes included.
    const double tol = 100.0 * cfg_.event_tol;
    const HybridState& s = states_[id];
    std::vector<int> out;
    for (int ei : h_.edges_from(s.mode))
        if (h_.edges[ei].guard.contains(s.point, tol)) out.push_back(ei);
    return out;
}

PointClass MappedSystem::classify(int id) {
    auto cached = class_cache_.find(id);
    if (cached != class_cache_.end()) return cached->second;

    const HybridState& s = states_[id];
    PointClass result;
    if (!enabled_edges(id).empty()) {
        result = PointClass::GuardPoint;
    } else if (is_equilibrium(h_, s.mode, s.point, cfg_.eq_tol)) {
        result = PointClass::Equilibrium;
    } else {
        FlowResult r = transverse(h_, s.mode, s.point, cfg_);
        if (r.kind == FlowKind::Exit && r.time == 0.0) {
            result = PointClass::Blocking;
        } else {
            throw EngineError("unclassifiable interior point in mode '" +
                              h_.modes[s.mode].name + "'");
        }
    }
    class_cache_.emplace(id, result);
    return result;
}

std::vector<std::string> MappedSystem::enabled_outputs(int id) {
    switch (classify(id)) {
        case PointClass::Blocking:
            return {};
        case PointClass::Equilibrium:
            return {output_of(id)};
        case PointClass::GuardPoint: {
            std::vector<std::string> ys;
            for (int ei : enabled_edges(id)) ys.push_back(h_.modes[h_.edges[ei].dst].output);
            std::sort(ys.begin(), ys.end());
            ys.erase(std::unique(ys.begin(), ys.end()), ys.end());
            return ys;
        }
    }
    return {};
}

int MappedSystem::register_equilibrium(int mode, const Vec& p) {
    for (int id : equilibria_) {
        const HybridState& s = states_[id];
        if (s.mode == mode && dist2(s.point, p) <= snap_radius_) return id;
    }
    int id = intern({mode, p});
    equilibria_.push_back(id);
    return id;
}

int MappedSystem::land(int mode, const Vec& from) {
    FlowResult r = transverse(h_, mode, from, cfg_);
    switch (r.kind) {
        case FlowKind::Exit:
            return intern({mode, r.point});
        case FlowKind::Equilibrium:
            return register_equilibrium(mode, r.point);
        case FlowKind::Timeout:
            throw EngineError("flow in mode '" + h_.modes[mode].name +
                              "' neither exits nor settles within the horizon");
        case FlowKind::Escaped:
            throw EngineError("flow in mode '" + h_.modes[mode].name +
                              "' could not localize its exit");
    }
    throw EngineError("unreachable flow result");
}

std::vector<int> MappedSystem::successors(int id, const std::string& y) {
    auto cached = succ_cache_.find({id, y});
    if (cached != succ_cache_.end()) return cached->second;

    const HybridState& s = states_[id];
    std::vector<int> result;
    std::string input;

    switch (classify(id)) {
        case PointClass::Blocking:
            break;
        case PointClass::Equilibrium:
            if (y == output_of(id)) {
                result.push_back(id);
                input = "*";
            }
            break;
        case PointClass::GuardPoint: {
            int chosen = -1;
            for (int ei : enabled_edges(id)) {
                if (h_.modes[h_.edges[ei].dst].output != y) continue;
                if (chosen >= 0)
                    throw EngineError("two enabled edges from mode '" + h_.modes[s.mode].name +
                                      "' produce output '" + y + "'");
                chosen = ei;
            }
            if (chosen < 0) break;
            const Edge& e = h_.edges[chosen];
            Vec reset_point(s.point.size());
            for (std::size_t i = 0; i < reset_point.size(); ++i)
                reset_point[i] = eval_linked(e.reset[i], s.point.data());
            int landed = land(e.dst, reset_point);
            if (landed != id) {
                result.push_back(landed);
                input = e.input;
            }
            break;
        }
    }

    succ_cache_.emplace(std::make_pair(id, y), result);
    if (!result.empty()) input_cache_.emplace(std::make_pair(id, y), input);
    return result;
}

std::string MappedSystem::successor_input(int id, const std::string& y) {
    successors(id, y);
    auto it = input_cache_.find({id, y});
    if (it == input_cache_.end())
        throw EngineError("no move with output '" + y + "' from state " + std::to_string(id));
    return it->second;
}

double state_distance(const MappedSystem& m, int a, int b) {
    const HybridState& sa = m.state(a);
    const HybridState& sb = m.state(b);
    if (sa.mode != sb.mode) return std::numeric_limits<double>::infinity();
    return dist2(sa.point, sb.point);
}

}  // namespace hybisim
