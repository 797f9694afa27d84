#ifndef FREQBAND_PLANNER_HPP
#define FREQBAND_PLANNER_HPP

#include <array>
#include <map>
#include <string>
#include <vector>

#include "freqband/hints.hpp"

// Deterministic rule engine mapping degradation hints to a restoration plan:
// one task token, a frequency focus, a rationale and a pipeline of steps.

namespace freqband::planner {

enum class TaskToken {
    kDeraining,
    kDesnowing,
    kDehazing,
    kDeblur,
    kDenoise,
    kLightEnhancement,
    kSuperResolution,
};

// Priority order used for tie-breaking; also the canonical listing order.
inline constexpr std::array<TaskToken, 7> kTaskOrder = {
    TaskToken::kDeraining,       TaskToken::kDesnowing, TaskToken::kDehazing,
    TaskToken::kDeblur,          TaskToken::kDenoise,   TaskToken::kLightEnhancement,
    TaskToken::kSuperResolution,
};

enum class Focus { kHigh, kLow };

const std::string& task_name(TaskToken t);
TaskToken task_from_name(const std::string& name);  // throws on unknown token
Focus focus_for(TaskToken t);
const std::string& focus_name(Focus f);

struct RestorationPlan {
    TaskToken task = TaskToken::kDenoise;
    Focus focus = Focus::kHigh;
    std::string rationale;
    std::vector<std::string> pipeline;
    std::map<TaskToken, double> severities;
};

// Normalized threshold margins, one per task; positive means the rule fires.
std::map<TaskToken, double> severity_scores(const hints::DegradationHints& h,
                                            const hints::HintThresholds& th);

RestorationPlan plan(const hints::DegradationHints& h, const hints::HintThresholds& th);

// "Task: <token>, Focus: <high|low>, Rationale: <...>, Pipeline: <s1 -> s2 -> ...>"
std::string render_plan(const RestorationPlan& p);

// Inverse of render_plan for the task/focus/rationale/pipeline fields
// (severities are not part of the line format).
RestorationPlan parse_plan(const std::string& line);

// Key-sorted JSON object {task, focus, rationale, pipeline, severities}.
std::string plan_to_json(const RestorationPlan& p);

}  // namespace freqband::planner

#endif
