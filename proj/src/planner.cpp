#include "freqband/planner.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace freqband::planner {

namespace {

constexpr double kEps = 1e-9;

const std::array<std::string, 7> kTaskNames = {
    "deraining", "desnowing",         "dehazing",        "deblur",
    "denoise",   "light_enhancement", "super_resolution"};

// Step templates deliberately avoid every task token as a substring.
const std::array<std::vector<std::string>, 7> kPipelines = {{
    {"detect streak orientation", "suppress oriented streaks",
     "restore edge micro-structure"},
    {"locate bright particles", "fill occluded regions",
     "blend recovered areas with surrounding texture"},
    {"estimate airlight", "estimate transmission map", "invert the scattering model",
     "restore contrast and color"},
    {"estimate the smearing kernel", "sharpen edges", "suppress ringing"},
    {"estimate grain level", "smooth flat regions", "preserve edges and texture"},
    {"lift global exposure", "correct the tone curve", "suppress amplified grain"},
    {"upsample to the target grid", "reconstruct fine texture",
     "enforce edge consistency"},
}};

std::string format_value(double v) {
    std::ostringstream os;
    os.precision(3);
    os << v;
    return os.str();
}

double mean3(double a, double b, double c) { return (a + b + c) / 3.0; }
double mean2(double a, double b) { return (a + b) / 2.0; }

std::string rationale_for(TaskToken task, const hints::DegradationHints& h,
                          bool any_fired) {
    if (!any_fired) return "no rule fired; conservative default";
    std::ostringstream os;
    switch (task) {
        case TaskToken::kDeraining:
            os << "oriented streak cues dominate (line_score=" << format_value(h.line_score)
               << ", anisotropy=" << format_value(h.anisotropy)
               << ", freq_ratio=" << format_value(h.freq_ratio) << ")";
            break;
        case TaskToken::kDesnowing:
            os << "isotropic bright particles dominate (small_blobs=" << h.small_blobs
               << ", anisotropy=" << format_value(h.snow_anisotropy) << ")";
            break;
        case TaskToken::kDehazing:
            os << "global veiling dominates (haze_score=" << format_value(h.haze_score)
               << ", depth_grad=" << format_value(h.depth_grad) << ")";
            break;
        case TaskToken::kDeblur:
            os << "edge softness dominates (grad95=" << format_value(h.grad95)
               << ", lap_var=" << format_value(h.lap_var)
               << ", hf_energy=" << format_value(h.hf_energy) << ")";
            break;
        case TaskToken::kDenoise:
            os << "flat-region grain dominates (noise_score=" << format_value(h.noise_score)
               << ", noise_mad=" << format_value(h.noise_mad) << ")";
            break;
        case TaskToken::kLightEnhancement:
            os << "global darkness dominates (mean_y=" << format_value(h.mean_y)
               << ", p50_y=" << format_value(h.p50_y) << ")";
            break;
        case TaskToken::kSuperResolution:
            os << "native resolution is small (min side "
               << std::min(h.height, h.width) << " px)";
            break;
    }
    return os.str();
}

}  // namespace

const std::string& task_name(TaskToken t) {
    return kTaskNames[static_cast<std::size_t>(t)];
}

TaskToken task_from_name(const std::string& name) {
    for (std::size_t i = 0; i < kTaskNames.size(); ++i) {
        if (kTaskNames[i] == name) return static_cast<TaskToken>(i);
    }
    throw std::invalid_argument("unknown task token: " + name);
}

Focus focus_for(TaskToken t) {
    switch (t) {
        case TaskToken::kDehazing:
        case TaskToken::kLightEnhancement:
            return Focus::kLow;
        default:
            // fine-scale artifacts and missing detail live in high frequencies
            return Focus::kHigh;
    }
}

const std::string& focus_name(Focus f) {
    static const std::string kHigh = "high", kLow = "low";
    return f == Focus::kHigh ? kHigh : kLow;
}

std::map<TaskToken, double> severity_scores(const hints::DegradationHints& h,
                                            const hints::HintThresholds& th) {
    std::map<TaskToken, double> s;
    s[TaskToken::kDeraining] = mean3(h.line_score / th.line_score_min - 1.0,
                                     h.anisotropy / th.anisotropy_min - 1.0,
                                     h.freq_ratio / th.freq_ratio_min - 1.0);
    s[TaskToken::kDesnowing] =
        mean2(static_cast<double>(h.small_blobs) / th.small_blobs_min - 1.0,
              th.snow_anisotropy_max / std::max(h.snow_anisotropy, kEps) - 1.0);
    s[TaskToken::kDenoise] = h.noise_score / th.noise_score_min - 1.0;
    s[TaskToken::kDeblur] = mean3(th.grad95_max / std::max(h.grad95, kEps) - 1.0,
                                  th.lap_var_max / std::max(h.lap_var, kEps) - 1.0,
                                  th.hf_energy_max / std::max(h.hf_energy, kEps) - 1.0);
    s[TaskToken::kDehazing] = mean2(h.haze_score / th.haze_score_min - 1.0,
                                    h.depth_grad / th.depth_grad_min - 1.0);
    s[TaskToken::kLightEnhancement] =
        std::max(th.mean_y_max / std::max(h.mean_y, kEps) - 1.0,
                 th.p50_max / std::max(h.p50_y, kEps) - 1.0);
    s[TaskToken::kSuperResolution] =
        th.sr_min_side / std::max(static_cast<double>(std::min(h.height, h.width)), kEps) -
        1.0;
    return s;
}

RestorationPlan plan(const hints::DegradationHints& h, const hints::HintThresholds& th) {
    RestorationPlan p;
    p.severities = severity_scores(h, th);

    TaskToken best = kTaskOrder[0];
    double best_margin = p.severities.at(best);
    for (TaskToken t : kTaskOrder) {
        const double m = p.severities.at(t);
        if (m > best_margin) {  // strict: earlier tasks win ties
            best = t;
            best_margin = m;
        }
    }

    const bool any_fired = best_margin > 0.0;
    p.task = any_fired ? best : TaskToken::kDenoise;
    p.focus = focus_for(p.task);
    p.rationale = rationale_for(p.task, h, any_fired);
    p.pipeline = kPipelines[static_cast<std::size_t>(p.task)];
    return p;
}

std::string render_plan(const RestorationPlan& p) {
    std::ostringstream os;
    os << "Task: " << task_name(p.task) << ", Focus: " << focus_name(p.focus)
       << ", Rationale: " << p.rationale << ", Pipeline: ";
    for (std::size_t i = 0; i < p.pipeline.size(); ++i) {
        if (i) os << " -> ";
        os << p.pipeline[i];
    }
    return os.str();
}

RestorationPlan parse_plan(const std::string& line) {
    const std::string task_key = "Task: ";
    const std::string focus_key = ", Focus: ";
    const std::string rationale_key = ", Rationale: ";
    const std::string pipeline_key = ", Pipeline: ";

    if (line.rfind(task_key, 0) != 0) throw std::invalid_argument("parse_plan: missing Task");
    const std::size_t focus_at = line.find(focus_key);
    const std::size_t rationale_at = line.find(rationale_key);
    const std::size_t pipeline_at = line.rfind(pipeline_key);
    if (focus_at == std::string::npos || rationale_at == std::string::npos ||
        pipeline_at == std::string::npos || !(focus_at < rationale_at) ||
        !(rationale_at < pipeline_at)) {
        throw std::invalid_argument("parse_plan: malformed line");
    }

    RestorationPlan p;
    p.task = task_from_name(line.substr(task_key.size(), focus_at - task_key.size()));
    const std::string focus =
        line.substr(focus_at + focus_key.size(), rationale_at - focus_at - focus_key.size());
    if (focus == "high") {
        p.focus = Focus::kHigh;
    } else if (focus == "low") {
        p.focus = Focus::kLow;
    } else {
        throw std::invalid_argument("parse_plan: bad focus: " + focus);
    }
    p.rationale = line.substr(rationale_at + rationale_key.size(),
                              pipeline_at - rationale_at - rationale_key.size());

    std::string steps = line.substr(pipeline_at + pipeline_key.size());
    const std::string sep = " -> ";
    std::size_t pos = 0;
    while (true) {
        const std::size_t next = steps.find(sep, pos);
        if (next == std::string::npos) {
            if (pos < steps.size()) p.pipeline.push_back(steps.substr(pos));
            break;
        }
        p.pipeline.push_back(steps.substr(pos, next - pos));
        pos = next + sep.size();
    }
    return p;
}

std::string plan_to_json(const RestorationPlan& p) {
    nlohmann::json j;
    j["task"] = task_name(p.task);
    j["focus"] = focus_name(p.focus);
    j["rationale"] = p.rationale;
    j["pipeline"] = p.pipeline;
    nlohmann::json sev;
    for (const auto& [task, margin] : p.severities) {
        sev[task_name(task)] = margin;
    }
    j["severities"] = sev;
    return j.dump();
}

}  // namespace freqband::planner
