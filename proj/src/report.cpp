#include "gconv/error.hpp"
#include "gconv/serialization.hpp"

namespace gconv {

using nlohmann::json;

void to_json(json& j, const ModelConfig& cfg) {
  j = json{{"arch", to_string(cfg.arch)},
           {"hidden_dim", cfg.hidden_dim},
           {"epochs", cfg.epochs},
           {"learning_rate", cfg.learning_rate},
           {"weight_decay", cfg.weight_decay},
           {"init_seed", cfg.init_seed},
           {"sgc_power", cfg.sgc_power},
           {"optimizer", to_string(cfg.optimizer)}};
}

void from_json(const json& j, ModelConfig& cfg) {
  const Arch arch = j.contains("arch") ? parse_arch(j.at("arch").get<std::string>()) : cfg.arch;
  if (arch != cfg.arch) cfg = ModelConfig::defaults(arch);
  cfg.hidden_dim = j.value("hidden_dim", cfg.hidden_dim);
  cfg.epochs = j.value("epochs", cfg.epochs);
  cfg.learning_rate = j.value("learning_rate", cfg.learning_rate);
  cfg.weight_decay = j.value("weight_decay", cfg.weight_decay);
  cfg.init_seed = j.value("init_seed", cfg.init_seed);
  cfg.sgc_power = j.value("sgc_power", cfg.sgc_power);
  if (j.contains("optimizer")) cfg.optimizer = parse_optimizer(j.at("optimizer").get<std::string>());
}

void to_json(json& j, const TrainReport& report) {
  auto accuracy = [](const Accuracy& a) { return json{{"train", a.train}, {"val", a.val}, {"test", a.test}}; };
  j = json{{"schema", "gconv.train_report/1"},
           {"kernel", report.kernel},
           {"model", report.model},
           {"dataset", report.dataset},
           {"best_epoch", report.best_epoch},
           {"accuracy", accuracy(report.accuracy)},
           {"final_accuracy", accuracy(report.final_accuracy)},
           {"initial_loss", report.initial_loss},
           {"best_loss", report.best_loss},
           {"loss_curve", report.loss_curve}};
}

}  // namespace gconv
