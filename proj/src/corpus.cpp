/*
 * Copyright (C) 2026 The regflow Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */
#include "regflow/corpus.hpp"

#include "regflow/errors.hpp"

#include <set>

namespace regflow
{

std::string_view to_string(Strictness s)
{
    return s == Strictness::strict ? "strict" : "lenient";
}

std::optional<Strictness> parse_strictness(std::string_view text)
{
    if (text == "strict") {
        return Strictness::strict;
    }
    if (text == "lenient") {
        return Strictness::lenient;
    }
    return std::nullopt;
}

void validate(const Schedule& s)
{
    if (s.strict_steps < 0 || s.lenient_steps < 0 || s.strict_steps + s.lenient_steps < 1) {
        throw ArgumentError("schedule needs non-negative phase lengths summing to at least 1");
    }
}

void validate(const Corpus& corpus)
{
    if (corpus.empty()) {
        throw ArgumentError("regulation corpus is empty");
    }
    std::set<std::string> ids;
    for (const auto& r : corpus) {
        if (!ids.insert(r.id).second) {
            throw ArgumentError("duplicate regulation id '" + r.id + "'");
        }
    }
}

Corpus build_default_corpus()
{
    const auto strict  = Strictness::strict;
    const auto lenient = Strictness::lenient;
    return {
        {"S1", strict, "Algorithm Transparency and Traceability",
         "Algorithm Transparency and Traceability: Manufacturers of AI-based medical devices must ensure "
         "comprehensive transparency of algorithmic processes. This includes the requirement to document and "
         "disclose the decision-making mechanisms at every stage of the model, particularly in complex "
         "architectures such as deep neural networks. The traceability of decisions made by the model must be "
         "established, providing a clear audit trail of how each layer contributes to the final outcome. This "
         "documentation should be structured to enable regulatory bodies to conduct in-depth assessments and "
         "identify specific points of failure or risk when necessary.",
         "transparency"},
        {"S2", strict, "Training Data Quality and Representativeness",
         "Training Data Quality and Representativeness: Manufacturers must demonstrate that every dataset used to "
         "train, tune or test the device is curated under a documented quality process. Data provenance, labeling "
         "protocols and inclusion criteria must be recorded for each source. Performance must be reported "
         "separately for each clinically relevant subgroup, and any subgroup whose performance falls below the "
         "declared acceptance criteria must be disclosed together with a remediation plan before market entry.",
         "data quality"},
        {"S3", strict, "Mandatory Post-Market Performance Monitoring",
         "Mandatory Post-Market Performance Monitoring: Manufacturers must operate a continuous monitoring system "
         "that tracks real-world device performance against the premarket claims. Drift in input distributions or "
         "in output accuracy must be detected with predefined statistical triggers, and every trigger event must "
         "be reported to the authority within 15 days together with a root-cause analysis and corrective action.",
         "post-market monitoring"},
        {"S4", strict, "Cybersecurity Controls and Threat Modeling",
         "Cybersecurity Controls and Threat Modeling: Manufacturers must submit a threat model covering every "
         "interface of the device, including model update channels and data pipelines. Controls against "
         "adversarial inputs, model extraction and data poisoning must be validated by independent testing. A "
         "software bill of materials must accompany each release, and known vulnerabilities must be patched within "
         "a documented and enforced time limit.",
         "cybersecurity"},
        {"S5", strict, "Predetermined Change Control for Adaptive Algorithms",
         "Predetermined Change Control for Adaptive Algorithms: Any modification to a deployed model, including "
         "retraining on new data, requires a predetermined change control plan approved in advance. The plan must "
         "specify the permitted modification types, the verification protocol for each and the performance limits "
         "that trigger a new submission. Changes outside the approved plan require full premarket review.",
         "change control"},
        {"L1", lenient, "Transparency Summary Guidance",
         "Transparency Summary Guidance: Manufacturers are encouraged to provide users with a plain-language "
         "summary of the intended use, the main inputs and the known limitations of the algorithm. Detailed "
         "architectural documentation may be retained internally and made available on request.",
         "transparency"},
        {"L2", lenient, "Data Management Good Practice",
         "Data Management Good Practice: Manufacturers should follow recognized good practices for data "
         "management and describe their general approach to dataset curation. Subgroup performance reporting is "
         "recommended where data allow but is not a condition of clearance.",
         "data quality"},
        {"L3", lenient, "Voluntary Real-World Performance Reporting",
         "Voluntary Real-World Performance Reporting: Manufacturers may establish real-world performance "
         "monitoring proportionate to device risk. Periodic summaries may be shared with the authority on a "
         "voluntary basis, and existing complaint-handling processes are considered sufficient for low-risk "
         "devices.",
         "post-market monitoring"},
        {"L4", lenient, "Baseline Cybersecurity Hygiene",
         "Baseline Cybersecurity Hygiene: Manufacturers should apply baseline cybersecurity measures consistent "
         "with current industry standards, including access control and timely patching. A formal threat model is "
         "recommended for connected devices but is not required for submission.",
         "cybersecurity"},
        {"L5", lenient, "Streamlined Algorithm Updates",
         "Streamlined Algorithm Updates: Minor algorithm updates that do not change the intended use may be "
         "implemented under the manufacturer's quality system and documented in the next periodic report. Only "
         "changes to the intended use or to the indicated population require a new submission.",
         "change control"},
    };
}

Strictness active_phase(int t, const Schedule& s)
{
    validate(s);
    if (t < 0) {
        throw ArgumentError("time step must be non-negative");
    }
    if (s.cycle) {
        const int period = s.strict_steps + s.lenient_steps;
        return t % period < s.strict_steps ? Strictness::strict : Strictness::lenient;
    }
    if (t < s.strict_steps) {
        return Strictness::strict;
    }
    // lenient for lenient_steps and held thereafter
    return Strictness::lenient;
}

std::vector<Regulation> regulations_for(int t, const Corpus& corpus, const Schedule& s)
{
    validate(corpus);
    const Strictness phase = active_phase(t, s);
    std::vector<Regulation> out;
    for (const auto& r : corpus) {
        if (r.strictness == phase) {
            out.push_back(r);
        }
    }
    if (out.empty()) {
        throw ArgumentError("corpus has no " + std::string(to_string(phase)) + " regulations");
    }
    return out;
}

} // namespace regflow
