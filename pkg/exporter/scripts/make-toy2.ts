/**
 * Regenerate the checked-in two-conv toy checkpoint under fixtures/toy2.
 * Values come from a fixed-seed PRNG so reruns reproduce the same bytes.
 */

import * as fs from 'node:fs';
import * as path from 'node:path';

const OUT_DIR = path.join(__dirname, '..', 'fixtures', 'toy2');
const SHARD = 'group1-shard1of1.bin';

// mulberry32: tiny deterministic PRNG, plenty for fixture data.
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

interface FixtureWeight {
  name: string;
  shape: number[];
  dtype: 'float32' | 'int32';
}

const WEIGHTS: FixtureWeight[] = [
  { name: 'conv1/kernel', shape: [3, 3, 3, 4], dtype: 'float32' },
  { name: 'conv1/bias', shape: [4], dtype: 'float32' },
  { name: 'conv2/kernel', shape: [3, 3, 4, 6], dtype: 'float32' },
  { name: 'quant/kernel', shape: [1, 1, 2, 2], dtype: 'int32' },
];

function main(): void {
  const rand = mulberry32(0x746f7932);
  const blocks: Buffer[] = [];
  for (const w of WEIGHTS) {
    const count = w.shape.reduce((a, b) => a * b, 1);
    const block = Buffer.alloc(count * 4);
    const view = new DataView(block.buffer, block.byteOffset, block.byteLength);
    for (let i = 0; i < count; i++) {
      if (w.dtype === 'float32') {
        view.setFloat32(i * 4, Math.fround(rand() * 2 - 1), true);
      } else {
        view.setInt32(i * 4, Math.floor(rand() * 256) - 128, true);
      }
    }
    blocks.push(block);
  }

  const modelJson = {
    format: 'layers-model',
    generatedBy: 'make-toy2',
    modelTopology: { class_name: 'Sequential', config: { name: 'toy2' } },
    weightsManifest: [
      {
        paths: [SHARD],
        weights: WEIGHTS.map((w) => ({ name: w.name, shape: w.shape, dtype: w.dtype })),
      },
    ],
  };

  fs.mkdirSync(OUT_DIR, { recursive: true });
  fs.writeFileSync(path.join(OUT_DIR, SHARD), Buffer.concat(blocks));
  fs.writeFileSync(
    path.join(OUT_DIR, 'model.json'), JSON.stringify(modelJson, null, 2) + '\n');
  const total = blocks.reduce((a, b) => a + b.length, 0);
  console.log(`wrote ${OUT_DIR}: model.json + ${SHARD} (${total} payload bytes)`);
}

main();
