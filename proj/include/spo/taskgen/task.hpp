#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "spo/microhome/types.hpp"

namespace spo::taskgen {

enum class Tier : std::uint8_t { UltraShort, Short, Medium, Long };

const char* tier_name(Tier t);  // "ultra_short", "short", "medium", "long"
Tier tier_from_name(const std::string& name);

// Plan-length buckets: <10 ultra-short, 10..19 short, 20..30 medium, >30 long.
// The shared boundary at 20 goes to medium and 30 stays medium by convention.
Tier classify_difficulty(int plan_length);

struct Task {
    std::string id;
    std::string instruction;
    std::uint64_t scene_seed = 0;
    std::vector<microhome::GoalCondition> goal;
    std::vector<microhome::Action> golden_plan;
    Tier tier = Tier::UltraShort;

    bool operator==(const Task&) const = default;
};

// JSONL persistence, one task per line with fields
// {id, instruction, scene_seed, goal[], golden_plan[], tier}.
std::string task_to_json(const Task& t);
Task task_from_json(const std::string& line);
void save_tasks(const std::string& path, const std::vector<Task>& tasks);
std::vector<Task> load_tasks(const std::string& path);

}  // namespace spo::taskgen
