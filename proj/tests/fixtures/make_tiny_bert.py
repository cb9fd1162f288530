#!/usr/bin/env python3
# Copyright 2026 The estime Authors.
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.
"""Generates the tiny random BERT bundle used by the C++ parity tests.

Writes tests/fixtures/tiny_bert/{model.safetensors,vocab.txt,manifest.json}
plus tests/fixtures/tiny_bert_reference.json holding tokenizer ids, masked
hidden states and top-k MLM logits computed with the reference PyTorch
implementation. Re-run only when the fixture format changes.
"""

import hashlib
import json
import os

import torch
from transformers import BertConfig, BertForMaskedLM, BertTokenizer
from transformers.models.bert.tokenization_bert_legacy import BasicTokenizer

HERE = os.path.dirname(os.path.abspath(__file__))
OUT = os.path.join(HERE, "tiny_bert")

SPECIAL = ["[PAD]", "[UNK]", "[CLS]", "[SEP]", "[MASK]"]
PUNCT = list(".,!?'\"-():;")
WORDS = """the a cat sat on mat dog ran in park hello world un ##happi ##ness
happy capital of france is paris new york city he she said was and to ##s
##ed ##ing play walk cafe resume naive it rain ##y day sun ##ny big small
red blue car house tree river man woman child old young 2020 1 ##9 ##0 at
by for with from up down out over The Paris France He She It cat ##s 中 国
人 an ##d ##e ##r ##t ##n ##o ##a ##i""".split()


def build_vocab():
  seen = []
  for tok in SPECIAL + PUNCT + WORDS:
    if tok not in seen:
      seen.append(tok)
  return seen


TOKENIZER_CASES = [
    "",
    "hello world",
    "unhappiness",
    "The cat sat on the mat.",
    "  Hello,   World!  ",
    "He said: \"Paris is the capital of France.\"",
    "Café résumé naïve",
    "中国人 in new york",
    "rainy sunny day's",
    "xylophone zebra",
    "1990 and 2020",
    "tab\tseparated\nnewline",
    "ÀÉÎ up-down (old)",
    "the [MASK] sat on [UNK] mat",
    "hello\u00adworld\u200b ok\x00!",
    "école Café cafe\u0301",
    " a\u3000b",
    "a" * 100,
    "a" * 101,
    "Σίσυφος ΟΔΟΣ İstanbul",
]

SENTENCES = [
    "the cat sat on the mat . the dog ran in the park .",
    "hello world , the capital of france is paris .",
    "he said the big red car was old and the small blue car was new .",
    "she walk ##ed to the river with the young child on a sun ##ny day .",
]


def main():
  os.makedirs(OUT, exist_ok=True)
  vocab = build_vocab()
  with open(os.path.join(OUT, "vocab.txt"), "w", encoding="utf-8") as f:
    for tok in vocab:
      f.write(tok + "\n")

  torch.manual_seed(1234)
  config = BertConfig(
      vocab_size=len(vocab),
      hidden_size=32,
      num_hidden_layers=3,
      num_attention_heads=4,
      intermediate_size=64,
      max_position_embeddings=24,
      type_vocab_size=2,
      initializer_range=0.2,
      hidden_act="gelu",
      layer_norm_eps=1e-12,
  )
  model = BertForMaskedLM(config)
  model.eval()
  model.save_pretrained(OUT, safe_serialization=True)
  for extra in ("config.json", "generation_config.json"):
    path = os.path.join(OUT, extra)
    if os.path.exists(path):
      os.remove(path)

  with open(os.path.join(OUT, "model.safetensors"), "rb") as f:
    checksum = hashlib.sha256(f.read()).hexdigest()

  ids = {tok: i for i, tok in enumerate(vocab)}
  manifest = {
      "format_version": 1,
      "architecture": "bert",
      "model_name": "tiny-random-bert-uncased",
      "hidden_layers": config.num_hidden_layers,
      "embedding_dim": config.hidden_size,
      "max_input_tokens": config.max_position_embeddings,
      "num_attention_heads": config.num_attention_heads,
      "intermediate_size": config.intermediate_size,
      "layer_norm_eps": config.layer_norm_eps,
      "hidden_act": "gelu",
      "graph_file": "model.safetensors",
      "tokenizer_file": "vocab.txt",
      "do_lower_case": True,
      "special_token_ids": {
          "pad": ids["[PAD]"],
          "unk": ids["[UNK]"],
          "cls": ids["[CLS]"],
          "sep": ids["[SEP]"],
          "mask": ids["[MASK]"],
      },
      "checksum": "sha256:" + checksum,
  }
  with open(os.path.join(OUT, "manifest.json"), "w") as f:
    json.dump(manifest, f, indent=2, sort_keys=True)
    f.write("\n")

  reference = {"tokenizer": [], "embeddings": [], "predictions": []}
  vocab_path = os.path.join(OUT, "vocab.txt")
  for lower in (True, False):
    tok = BertTokenizer(vocab_path, do_lower_case=lower)
    basic = BasicTokenizer(do_lower_case=lower, never_split=SPECIAL)
    for text in TOKENIZER_CASES:
      pieces = tok.tokenize(text)
      reference["tokenizer"].append({
          "text": text,
          "do_lower_case": lower,
          "ids": tok.convert_tokens_to_ids(pieces),
          "tokens": pieces,
          "basic": basic.tokenize(text),
      })

  cls, sep, mask = ids["[CLS]"], ids["[SEP]"], ids["[MASK]"]

  def run(content, masks):
    inp = [cls] + [mask if i in masks else t for i, t in enumerate(content)]
    inp.append(sep)
    with torch.no_grad():
      out = model(
          input_ids=torch.tensor([inp]),
          attention_mask=torch.ones(1, len(inp), dtype=torch.long),
          output_hidden_states=True,
      )
    return out

  for s, sentence in enumerate(SENTENCES):
    content = [ids[w] for w in sentence.split()]
    window = (0, min(len(content), config.max_position_embeddings - 2))
    content_w = content[window[0]:window[1]]
    masks = [p for p in range(window[0], window[1]) if p % 4 == s % 4]
    local = [p - window[0] for p in masks]
    out = run(content_w, set(local))
    for layer in range(1, config.num_hidden_layers + 1):
      hs = out.hidden_states[layer][0]
      reference["embeddings"].append({
          "ids": content,
          "window": list(window),
          "masks": masks,
          "layer": layer,
          "vectors": [hs[p + 1].tolist() for p in local],
      })
    for pos in local[:2]:
      single = run(content_w, {pos})
      logits = single.logits[0, pos + 1]
      special = [ids[t] for t in SPECIAL]
      logits_ns = logits.clone()
      logits_ns[special] = float("-inf")
      top = torch.topk(logits_ns, 5)
      reference["predictions"].append({
          "ids": content_w,
          "position": pos,
          "top_ids": top.indices.tolist(),
          "top_scores": top.values.tolist(),
      })

  with open(os.path.join(HERE, "tiny_bert_reference.json"), "w") as f:
    json.dump(reference, f, indent=1)
    f.write("\n")


if __name__ == "__main__":
  main()
