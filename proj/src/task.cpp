#include "spo/taskgen/task.hpp"

#include <fstream>
#include <stdexcept>

#include <nlohmann/json.hpp>

namespace spo::taskgen {

using nlohmann::json;

const char* tier_name(Tier t) {
    switch (t) {
        case Tier::UltraShort: return "ultra_short";
        case Tier::Short: return "short";
        case Tier::Medium: return "medium";
        case Tier::Long: return "long";
    }
    return "?";
}

Tier tier_from_name(const std::string& name) {
    for (Tier t : {Tier::UltraShort, Tier::Short, Tier::Medium, Tier::Long}) {
        if (name == tier_name(t)) return t;
    }
    throw std::invalid_argument("unknown tier: " + name);
}

Tier classify_difficulty(int plan_length) {
    if (plan_length < 1) throw std::invalid_argument("plan length must be >= 1");
    if (plan_length < 10) return Tier::UltraShort;
    if (plan_length < 20) return Tier::Short;
    if (plan_length <= 30) return Tier::Medium;
    return Tier::Long;
}

std::string task_to_json(const Task& t) {
    json goal = json::array();
    for (const auto& g : t.goal) {
        goal.push_back({{"predicate", microhome::predicate_name(g.predicate)},
                        {"subject", g.subject},
                        {"target", g.target}});
    }
    json plan = json::array();
    for (const auto& a : t.golden_plan) plan.push_back(a.str());
    json j{{"id", t.id},
           {"instruction", t.instruction},
           {"scene_seed", t.scene_seed},
           {"goal", goal},
           {"golden_plan", plan},
           {"tier", tier_name(t.tier)}};
    return j.dump();
}

Task task_from_json(const std::string& line) {
    json j = json::parse(line);
    Task t;
    t.id = j.at("id").get<std::string>();
    t.instruction = j.at("instruction").get<std::string>();
    t.scene_seed = j.at("scene_seed").get<std::uint64_t>();
    for (const auto& g : j.at("goal")) {
        auto pred = microhome::predicate_from_name(g.at("predicate").get<std::string>());
        if (!pred) throw std::invalid_argument("bad goal predicate in task " + t.id);
        t.goal.push_back({*pred, g.at("subject").get<std::string>(), g.at("target").get<std::string>()});
    }
    for (const auto& a : j.at("golden_plan")) t.golden_plan.push_back(microhome::Action::parse(a.get<std::string>()));
    t.tier = tier_from_name(j.at("tier").get<std::string>());
    return t;
}

void save_tasks(const std::string& path, const std::vector<Task>& tasks) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path);
    for (const auto& t : tasks) out << task_to_json(t) << "\n";
}

std::vector<Task> load_tasks(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read " + path);
    std::vector<Task> tasks;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty()) tasks.push_back(task_from_json(line));
    }
    return tasks;
}

}  // namespace spo::taskgen
