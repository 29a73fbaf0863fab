/** Hashed bag-of-words featurizer: tokens -> fixed-width L2-normalized counts. */

export const FEATURE_DIM = 512;

export function tokenize(text: string): string[] {
  return text
    .toLowerCase()
    .split(/[^\p{L}\p{N}]+/u)
    .filter((t) => t.length > 0);
}

/** FNV-1a 32-bit hash; stable across runs and platforms. */
export function fnv1a(token: string): number {
  let hash = 0x811c9dc5;
  for (let i = 0; i < token.length; i++) {
    hash ^= token.charCodeAt(i);
    hash = Math.imul(hash, 0x01000193);
  }
  return hash >>> 0;
}

export function featurize(text: string, dim: number = FEATURE_DIM): Float32Array {
  const vec = new Float32Array(dim);
  for (const token of tokenize(text)) {
    vec[fnv1a(token) % dim] += 1;
  }
  let norm = 0;
  for (let i = 0; i < dim; i++) norm += vec[i] * vec[i];
  norm = Math.sqrt(norm);
  if (norm > 0) {
    for (let i = 0; i < dim; i++) vec[i] /= norm;
  }
  return vec;
}

export function featurizeBatch(texts: string[], dim: number = FEATURE_DIM): Float32Array {
  const out = new Float32Array(texts.length * dim);
  texts.forEach((text, row) => {
    out.set(featurize(text, dim), row * dim);
  });
  return out;
}
