// Copyright 2026 The lexnmt Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


#include <CLI11.hpp>

#include <algorithm>
#include <functional>
#include <iostream>
#include <vector>

#include "commands.hpp"
#include "lexnmt/config.hpp"
#include "lexnmt/io.hpp"

namespace {

using lexnmt::cli::Settings;

struct OptionSpec {
  const char* key;
  const char* help;
  bool flag = false;
};

struct CommandSpec {
  const char* name;
  const char* help;
  std::vector<OptionSpec> options;
  std::function<int(const Settings&)> run;
};

const std::vector<OptionSpec> kCommon = {
    {"config", "flat key=value configuration file"},
    {"profile", "hyperparameter profile: desk|paper"},
    {"seed", "random seed"},
};

std::vector<CommandSpec> commands() {
  return {
      {"vocab",
       "build a thresholded vocabulary from one side of a corpus",
       {{"corpus", "tokenized corpus, one sentence per line"},
        {"threshold", "minimum word count"},
        {"lang", "language tag"},
        {"out", "output vocabulary file"}},
       lexnmt::cli::cmd_vocab},
      {"lexicon-train",
       "learn an automatic lexicon with IBM Model 1",
       {{"src", "source side of the training corpus"},
        {"trg", "target side of the training corpus"},
        {"src-vocab", "source vocabulary"},
        {"trg-vocab", "target vocabulary"},
        {"ibm-iterations", "EM iterations"},
        {"null-word", "add a NULL source word", true},
        {"out", "output lexicon file"}},
       lexnmt::cli::cmd_lexicon_train},
      {"lexicon-merge",
       "build a manual lexicon from a dictionary, or fill up an automatic one with it",
       {{"auto", "automatic lexicon file (omit to write the manual lexicon)"},
        {"manual", "dictionary TSV: source<TAB>target"},
        {"src-vocab", "source vocabulary"},
        {"trg-vocab", "target vocabulary"},
        {"out", "output lexicon file"}},
       lexnmt::cli::cmd_lexicon_merge},
      {"train",
       "train a translation model",
       {{"src", "training source"},
        {"trg", "training target"},
        {"dev-src", "dev source"},
        {"dev-trg", "dev target"},
        {"src-vocab", "source vocabulary"},
        {"trg-vocab", "target vocabulary"},
        {"mode", "base|bias|linear"},
        {"lexicon", "lexicon file (bias/linear)"},
        {"layers", "LSTM layers"},
        {"hidden", "hidden size"},
        {"embed", "embedding size"},
        {"batch-size", "batch size"},
        {"epochs", "training epochs"},
        {"epsilon", "bias smoothing constant"},
        {"dropout", "dropout rate"},
        {"learning-rate", "Adam step size"},
        {"max-len", "maximum training sentence length"},
        {"out", "output model file"},
        {"curve-out", "training curve TSV"}},
       lexnmt::cli::cmd_train},
      {"translate",
       "beam-search translation with unknown-word replacement",
       {{"model", "model file"},
        {"src-vocab", "source vocabulary"},
        {"trg-vocab", "target vocabulary"},
        {"input", "tokenized source sentences"},
        {"lexicon", "lexicon used by the model (bias/linear)"},
        {"replace-lexicon", "lexicon for unknown-word replacement (default: --lexicon)"},
        {"no-unk-replace", "keep <unk> tokens in the output", true},
        {"beam", "beam width"},
        {"eos-discount", "multiplier on the EOS probability"},
        {"max-output-len", "maximum output length (0: 2|F|+5)"},
        {"threads", "decoding threads"},
        {"attention-out", "attention sidecar TSV"},
        {"unk-out", "JSON-lines record of replacements"},
        {"out", "output translations"}},
       lexnmt::cli::cmd_translate},
      {"evaluate",
       "score translations: BLEU, NIST, rare-word recall, attention entropy, bootstrap",
       {{"hyp", "system output"},
        {"ref", "references"},
        {"train-trg", "target side of the training corpus (for rare-word recall)"},
        {"rare-threshold", "rare word count threshold"},
        {"rare-scope", "either|training"},
        {"attention", "attention sidecar TSV from translate"},
        {"compare", "second system output for paired bootstrap"},
        {"bootstrap-iterations", "bootstrap resamples"},
        {"system", "system name for the TSV row"},
        {"smooth", "smoothed BLEU", true},
        {"json-out", "JSON report"},
        {"out", "TSV summary row"}},
       lexnmt::cli::cmd_evaluate},
  };
}

std::string normalize_key(std::string key) {
  std::replace(key.begin(), key.end(), '_', '-');
  return key;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"lexnmt: attentional NMT with discrete translation lexicons"};
  app.require_subcommand(1);
  auto specs = commands();
  // Storage for the raw flag values, per subcommand.
  std::vector<std::map<std::string, std::string>> values(specs.size());
  std::vector<std::map<std::string, bool>> flag_values(specs.size());
  std::vector<std::map<std::string, CLI::Option*>> handles(specs.size());
  std::vector<CLI::App*> subs;

  // Extra spellings that map onto a canonical key.
  const std::map<std::string, std::string> aliases = {{"iterations", "ibm-iterations"}};

  for (std::size_t c = 0; c < specs.size(); ++c) {
    auto* sub = app.add_subcommand(specs[c].name, specs[c].help);
    subs.push_back(sub);
    auto all = kCommon;
    all.insert(all.end(), specs[c].options.begin(), specs[c].options.end());
    for (const auto& opt : all) {
      const std::string key = opt.key;
      if (opt.flag)
        handles[c][key] = sub->add_flag("--" + key, flag_values[c][key], opt.help);
      else
        handles[c][key] = sub->add_option("--" + key, values[c][key], opt.help);
    }
    for (const auto& [alias, key] : aliases)
      if (handles[c].count(key))
        handles[c][alias] = sub->add_option("--" + alias, values[c][key], "alias of --" + key);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  for (std::size_t c = 0; c < specs.size(); ++c) {
    if (!subs[c]->parsed()) continue;
    try {
      Settings settings;
      if (handles[c]["config"]->count() > 0) {
        for (auto& [k, v] : lexnmt::read_config_file(values[c]["config"])) {
          auto key = normalize_key(k);
          if (aliases.count(key)) key = aliases.at(key);
          settings[key] = v;
        }
      }
      for (auto& [key, opt] : handles[c]) {
        if (key == "config" || aliases.count(key) || opt->count() == 0) continue;
        settings[key] = flag_values[c].count(key) ? (flag_values[c][key] ? "true" : "false")
                                                  : values[c][key];
      }
      for (const auto& [alias, key] : aliases)
        if (handles[c].count(alias) && handles[c][alias]->count() > 0) settings[key] = values[c][key];
      settings["command"] = specs[c].name;
      return specs[c].run(settings);
    } catch (const std::exception& e) {
      std::string msg = e.what();
      std::replace(msg.begin(), msg.end(), '\n', ' ');
      std::cerr << "lexnmt: error: " << msg << std::endl;
      return 1;
    }
  }
  return 1;
}
