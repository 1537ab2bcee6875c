/**
 * Encoders turn a whitespace-tokenized sentence pair into one vector per
 * subword position of the jointly encoded sequence
 * `[CLS] source [SEP] reference [SEP]`, plus the subword-to-token grouping
 * needed to pool rows back to whitespace tokens.
 *
 * The built-in hash encoder is fully deterministic and runs anywhere; a real
 * frozen transformer encoder plugs in behind the same interface.
 */

export interface EncodedPair {
  /** One row per subword position of the joint sequence, length = dim. */
  rows: Float64Array[];
  /**
   * Grouping of subword positions: markers are singleton groups, and each
   * whitespace token owns one group of consecutive positions. Order:
   * [CLS], n source tokens, [SEP], m reference tokens, [SEP].
   */
  groups: number[][];
}

export interface Encoder {
  readonly dim: number;
  readonly maxSubwords: number;
  encodeBatch(pairs: Array<{ source: string[]; reference: string[] }>): EncodedPair[];
}

const FNV_OFFSET = 0xcbf29ce484222325n;
const FNV_PRIME = 0x100000001b3n;
const MASK64 = 0xffffffffffffffffn;

export function fnv1a64(text: string): bigint {
  let hash = FNV_OFFSET;
  const bytes = Buffer.from(text, "utf-8");
  for (const byte of bytes) {
    hash ^= BigInt(byte);
    hash = (hash * FNV_PRIME) & MASK64;
  }
  return hash;
}

/** Deterministic PRNG (mulberry32) seeded from a 64-bit hash. */
function mulberry32(seed: number): () => number {
  let a = seed >>> 0;
  return () => {
    a = (a + 0x6d2b79f5) >>> 0;
    let t = a;
    t = Math.imul(t ^ (t >>> 15), t | 1);
    t ^= t + Math.imul(t ^ (t >>> 7), t | 61);
    return ((t ^ (t >>> 14)) >>> 0) / 4294967296;
  };
}

/** Split a token into deterministic subword pieces of at most four chars. */
export function subwords(token: string): string[] {
  const pieces: string[] = [];
  for (let i = 0; i < token.length; i += 4) {
    const piece = token.slice(i, i + 4);
    pieces.push(i === 0 ? piece : `##${piece}`);
  }
  return pieces;
}

export class HashEncoder implements Encoder {
  readonly dim: number;
  readonly maxSubwords: number;
  private readonly seed: number;
  private readonly baseCache = new Map<string, Float64Array>();

  constructor(dim = 768, seed = 0, maxSubwords = 512) {
    this.dim = dim;
    this.seed = seed;
    this.maxSubwords = maxSubwords;
  }

  private baseVector(piece: string): Float64Array {
    const cached = this.baseCache.get(piece);
    if (cached) return cached;
    const hash = fnv1a64(piece) ^ BigInt(this.seed >>> 0);
    const rng = mulberry32(Number(hash & 0xffffffffn) ^ Number((hash >> 32n) & 0xffffffffn));
    const vec = new Float64Array(this.dim);
    for (let i = 0; i < this.dim; i += 2) {
      // Box-Muller transform; u clamped away from zero
      const u = Math.max(rng(), 1e-12);
      const v = rng();
      const radius = Math.sqrt(-2 * Math.log(u));
      vec[i] = radius * Math.cos(2 * Math.PI * v);
      if (i + 1 < this.dim) vec[i + 1] = radius * Math.sin(2 * Math.PI * v);
    }
    let norm = 0;
    for (const x of vec) norm += x * x;
    norm = Math.sqrt(norm);
    for (let i = 0; i < this.dim; i++) vec[i] /= norm;
    this.baseCache.set(piece, vec);
    return vec;
  }

  encodeBatch(pairs: Array<{ source: string[]; reference: string[] }>): EncodedPair[] {
    return pairs.map((pair) => this.encodePair(pair.source, pair.reference));
  }

  private encodePair(source: string[], reference: string[]): EncodedPair {
    const pieces: string[] = [];
    const groups: number[][] = [];
    const pushGroup = (groupPieces: string[]) => {
      const group: number[] = [];
      for (const piece of groupPieces) {
        group.push(pieces.length);
        pieces.push(piece);
      }
      groups.push(group);
    };
    pushGroup(["[CLS]"]);
    for (const token of source) pushGroup(subwords(token));
    pushGroup(["[SEP]"]);
    for (const token of reference) pushGroup(subwords(token));
    pushGroup(["[SEP]"]);

    if (pieces.length > this.maxSubwords) {
      throw new RangeError(
        `pair has ${pieces.length} subword positions, encoder limit is ${this.maxSubwords}`,
      );
    }

    // context mixing over the joint sequence, window of two positions each way
    const base = pieces.map((piece) => this.baseVector(piece));
    const rows = pieces.map((_, i) => {
      const lo = Math.max(0, i - 2);
      const hi = Math.min(pieces.length, i + 3);
      const row = new Float64Array(this.dim);
      let neighbors = 0;
      for (let j = lo; j < hi; j++) {
        if (j === i) continue;
        neighbors++;
        for (let d = 0; d < this.dim; d++) row[d] += base[j][d];
      }
      for (let d = 0; d < this.dim; d++) {
        row[d] = 0.6 * base[i][d] + (neighbors ? (0.4 * row[d]) / neighbors : 0);
      }
      let norm = 0;
      for (const x of row) norm += x * x;
      norm = Math.sqrt(norm);
      for (let d = 0; d < this.dim; d++) row[d] /= norm;
      return row;
    });
    return { rows, groups };
  }
}

export type PoolMode = "mean" | "last";

/** Pool subword rows to one row per group (marker or whitespace token). */
export function poolToTokens(encoded: EncodedPair, dim: number, mode: PoolMode): Float64Array[] {
  return encoded.groups.map((group) => {
    if (mode === "last") {
      return encoded.rows[group[group.length - 1]];
    }
    const out = new Float64Array(dim);
    for (const idx of group) {
      for (let d = 0; d < dim; d++) out[d] += encoded.rows[idx][d];
    }
    for (let d = 0; d < dim; d++) out[d] /= group.length;
    return out;
  });
}

export function buildEncoder(name: string, dim: number, maxSubwords: number): Encoder {
  if (name === "hash") {
    return new HashEncoder(dim, 0, maxSubwords);
  }
  throw new Error(
    `unknown encoder "${name}"; only the deterministic "hash" encoder ships with ` +
      `this tool (a frozen pretrained encoder plugs in behind the Encoder interface)`,
  );
}
