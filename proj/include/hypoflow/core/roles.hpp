#pragma once

#include <array>
#include <string_view>

namespace hypoflow::roles {

inline constexpr std::string_view kScientist1 = "Scientist_1";
inline constexpr std::string_view kScientist2 = "Scientist_2";
inline constexpr std::string_view kCoder1 = "Coder_1";
inline constexpr std::string_view kCoder2 = "Coder_2";
inline constexpr std::string_view kRefiner1 = "Refiner_1";
inline constexpr std::string_view kRefiner2 = "Refiner_2";
inline constexpr std::string_view kPlotDesigner1 = "Plot_Designer_1";
inline constexpr std::string_view kPlotDesigner2 = "Plot_Designer_2";
inline constexpr std::string_view kPlotAnalyzer = "Plot_Analyzer";

// Every role the pipeline calls; each needs a model binding in the config.
inline constexpr std::array<std::string_view, 19> kAll = {
    kScientist1,       kScientist2,     kCoder1,          kCoder2,         kRefiner1,
    kRefiner2,         kPlotDesigner1,  kPlotDesigner2,   kPlotAnalyzer,   "Introduction_1",
    "Introduction_2",  "Methods_1",     "Methods_2",      "Results_1",     "Results_2",
    "Conclusion_1",    "Conclusion_2",  "Outlook_1",      "Outlook_2",
};

bool is_known(std::string_view role);

// Generators end in "_1", their reflectors in "_2". Plot_Analyzer has no
// partner.
bool is_reflector(std::string_view role);

}  // namespace hypoflow::roles
