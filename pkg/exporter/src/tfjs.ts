/**
 * Minimal reader for layers-model checkpoints: a model.json whose
 * weightsManifest names the weight tensors and the shard .bin files that
 * hold them. Each manifest group concatenates its shards; weights occupy
 * consecutive byte ranges in declaration order.
 */

import * as fs from 'node:fs';
import * as path from 'node:path';

export class CheckpointError extends Error {}

export interface ManifestWeight {
  name: string;
  shape: number[];
  dtype: string;
  quantization?: object;
}

interface ManifestGroup {
  paths: string[];
  weights: ManifestWeight[];
}

interface ModelJson {
  weightsManifest: ManifestGroup[];
}

export interface CheckpointWeight {
  name: string;
  shape: number[];
  dtype: string;
  /** Raw little-endian bytes exactly as stored in the shard. */
  bytes: Buffer;
}

const DTYPE_BYTES: { [dtype: string]: number } = {
  float32: 4,
  int32: 4,
  uint8: 1,
  bool: 1,
};

function sizeOf(shape: number[]): number {
  let n = 1;
  for (const dim of shape) {
    if (!Number.isInteger(dim) || dim <= 0) {
      throw new CheckpointError(`bad shape dimension ${dim} in [${shape.join(', ')}]`);
    }
    n *= dim;
  }
  return n;
}

export function readCheckpoint(modelJsonPath: string): CheckpointWeight[] {
  let text: string;
  try {
    text = fs.readFileSync(modelJsonPath, 'utf-8');
  } catch (err) {
    throw new CheckpointError(`cannot read checkpoint ${modelJsonPath}: ${err}`);
  }
  let doc: ModelJson;
  try {
    doc = JSON.parse(text) as ModelJson;
  } catch (err) {
    throw new CheckpointError(`malformed JSON in ${modelJsonPath}: ${err}`);
  }
  if (!Array.isArray(doc.weightsManifest)) {
    throw new CheckpointError(`${modelJsonPath} has no weightsManifest array`);
  }

  const dir = path.dirname(modelJsonPath);
  const weights: CheckpointWeight[] = [];
  for (const group of doc.weightsManifest) {
    const shards = group.paths.map((p) => {
      const shardPath = path.join(dir, p);
      try {
        return fs.readFileSync(shardPath);
      } catch (err) {
        throw new CheckpointError(`cannot read shard ${shardPath}: ${err}`);
      }
    });
    const blob = Buffer.concat(shards);
    let offset = 0;
    for (const w of group.weights) {
      if (w.quantization) {
        throw new CheckpointError(`weight ${w.name}: quantized storage is not supported`);
      }
      const itemBytes = DTYPE_BYTES[w.dtype];
      if (itemBytes === undefined) {
        throw new CheckpointError(`weight ${w.name}: unknown dtype "${w.dtype}"`);
      }
      const byteLen = sizeOf(w.shape) * itemBytes;
      if (offset + byteLen > blob.length) {
        throw new CheckpointError(
          `weight ${w.name} needs bytes [${offset}, ${offset + byteLen}) but the ` +
          `shard group holds only ${blob.length}`);
      }
      weights.push({
        name: w.name,
        shape: w.shape.slice(),
        dtype: w.dtype,
        bytes: blob.subarray(offset, offset + byteLen),
      });
      offset += byteLen;
    }
  }
  return weights;
}

/**
 * Reorder a conv kernel stored as [kh][kw][in][out] (the layers-model
 * convention) into flat row-major [out][in][kh][kw]. Elements move as raw
 * 32-bit patterns so every value survives bit for bit.
 */
export function hwioToOihw(bytes: Buffer, shape: number[]): Float32Array {
  const [kh, kw, inC, outC] = shape;
  const count = kh * kw * inC * outC;
  if (bytes.length !== count * 4) {
    throw new CheckpointError(
      `kernel byte length ${bytes.length} does not match shape [${shape.join(', ')}]`);
  }
  const src = new DataView(bytes.buffer, bytes.byteOffset, bytes.byteLength);
  const data = new Float32Array(count);
  const bits = new Uint32Array(data.buffer);
  for (let h = 0; h < kh; h++) {
    for (let w = 0; w < kw; w++) {
      for (let i = 0; i < inC; i++) {
        for (let o = 0; o < outC; o++) {
          const srcIndex = ((h * kw + w) * inC + i) * outC + o;
          const dstIndex = ((o * inC + i) * kh + h) * kw + w;
          bits[dstIndex] = src.getUint32(srcIndex * 4, true);
        }
      }
    }
  }
  return data;
}
