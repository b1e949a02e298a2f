import * as fs from 'node:fs';
import * as os from 'node:os';
import * as path from 'node:path';

export const TOY2 = path.join(__dirname, '..', 'fixtures', 'toy2', 'model.json');
export const TOY2_SHARD = path.join(__dirname, '..', 'fixtures', 'toy2', 'group1-shard1of1.bin');

export function tmpDir(tag: string): string {
  return fs.mkdtempSync(path.join(os.tmpdir(), `nrpw-${tag}-`));
}

export interface TmpWeight {
  name: string;
  shape: number[];
  dtype: string;
  /** 32-bit patterns, one per element; 1-byte dtypes take the low byte. */
  words: number[];
}

/** Write a single-shard checkpoint for tests that need odd inputs. */
export function writeCheckpoint(dir: string, weights: TmpWeight[]): string {
  const blocks: Buffer[] = [];
  for (const w of weights) {
    const itemBytes = w.dtype === 'uint8' || w.dtype === 'bool' ? 1 : 4;
    const block = Buffer.alloc(w.words.length * itemBytes);
    const view = new DataView(block.buffer, block.byteOffset, block.byteLength);
    w.words.forEach((word, i) => {
      if (itemBytes === 1) {
        view.setUint8(i, word & 0xff);
      } else {
        view.setUint32(i * 4, word >>> 0, true);
      }
    });
    blocks.push(block);
  }
  const doc = {
    format: 'layers-model',
    modelTopology: { class_name: 'Sequential', config: { name: 'tmp' } },
    weightsManifest: [
      {
        paths: ['shard.bin'],
        weights: weights.map((w) => ({ name: w.name, shape: w.shape, dtype: w.dtype })),
      },
    ],
  };
  fs.writeFileSync(path.join(dir, 'shard.bin'), Buffer.concat(blocks));
  const modelPath = path.join(dir, 'model.json');
  fs.writeFileSync(modelPath, JSON.stringify(doc, null, 2) + '\n');
  return modelPath;
}

/** Bit pattern of a float32 value, for building payloads in tests. */
export function f32Bits(value: number): number {
  const buf = new DataView(new ArrayBuffer(4));
  buf.setFloat32(0, value, true);
  return buf.getUint32(0, true);
}
