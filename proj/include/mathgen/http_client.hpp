#pragma once

#include "mathgen/llm_client.hpp"

namespace mathgen {

// Single-attempt chat-completions transport speaking the OpenAI-compatible
// wire protocol with bearer auth. endpoint is the base URL; the path
// /chat/completions is appended unless already present.
class HttpTransport final : public ChatTransport {
public:
    explicit HttpTransport(ModelConfig config);

    Completion send(const std::vector<Message>& messages) override;
    std::string model_id() const override { return m_config.model_id; }

private:
    ModelConfig m_config;
};

}  // namespace mathgen
