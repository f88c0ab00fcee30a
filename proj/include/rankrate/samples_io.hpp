#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "rankrate/mfm_sampler.hpp"

namespace rankrate {

// File names of a posterior sample directory.
inline constexpr const char* kTraceFile = "trace.csv";                 // iter,K,Kplus,gamma,logpost
inline constexpr const char* kWeightsFile = "weights.csv";             // iter,class,value
inline constexpr const char* kLabelsFile = "labels.csv";               // iter,judge,class
inline constexpr const char* kClassParamsFile = "class_params.csv";    // iter,class,param,index,value
inline constexpr const char* kSamplesInfoFile = "samples_info.csv";    // key,value
inline constexpr const char* kOrderedWeightsFile = "trace_weights_ordered.csv";

// Writes the four sample tables plus the info table; returns the paths.
std::vector<std::filesystem::path> write_samples(const PosteriorSamples& samples, const std::filesystem::path& dir);

// Reconstructs samples written by write_samples; values round-trip exactly.
PosteriorSamples read_samples(const std::filesystem::path& dir);

// Sample tables plus a wide weight trace whose columns are classes in
// descending order of posterior mean weight (NA where a draw has fewer classes).
std::vector<std::filesystem::path> trace_export(const PosteriorSamples& samples, const std::filesystem::path& dir);

}  // namespace rankrate
