/**
 * Deterministic hashed character n-gram sentence embedder.
 *
 * Transformer embeddings need model weights that cannot ship with this
 * repository, so the service embeds text with a fixed feature-hashing
 * scheme instead: character n-grams (sizes 2 to 4 over the sentinel-padded,
 * lower-cased text) are hashed with FNV-1a into signed buckets and the
 * bucket vector is L2 normalized. Identical text always yields the
 * identical unit vector, and near-identical phrases share most of their
 * n-grams, which is what the alignment client needs from a distance.
 */

export const MODELS = {
  "hash-ngram-256": 256,
  "hash-ngram-512": 512,
} as const;

export type ModelName = keyof typeof MODELS;

export const DEFAULT_MODEL: ModelName = "hash-ngram-256";

const NGRAM_SIZES = [2, 3, 4];
const PAD_START = "";
const PAD_END = "";

/** FNV-1a over the UTF-16 code units of text[start, end). */
function fnv1a(text: string, start: number, end: number): number {
  let hash = 0x811c9dc5;
  for (let i = start; i < end; i++) {
    hash ^= text.charCodeAt(i);
    hash = Math.imul(hash, 0x01000193);
  }
  return hash >>> 0;
}

export class Embedder {
  readonly model: ModelName;
  readonly dim: number;

  constructor(model: ModelName) {
    this.model = model;
    this.dim = MODELS[model];
  }

  embedOne(text: string): number[] {
    const padded = PAD_START + text.normalize("NFC").toLowerCase() + PAD_END;
    const buckets = new Float64Array(this.dim);
    for (const size of NGRAM_SIZES) {
      for (let start = 0; start + size <= padded.length; start++) {
        const hash = fnv1a(padded, start, start + size);
        const sign = hash & 0x80000000 ? -1 : 1;
        buckets[hash % this.dim] += sign;
      }
    }
    let norm = Math.hypot(...buckets);
    if (norm === 0) {
      buckets[0] = 1;
      norm = 1;
    }
    return Array.from(buckets, (value) => value / norm);
  }

  embed(texts: readonly string[]): number[][] {
    return texts.map((text) => this.embedOne(text));
  }
}
