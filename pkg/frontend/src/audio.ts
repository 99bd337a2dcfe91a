// Speed feedback as a gain-modulated tone. Muted by default; the browser
// requires a user gesture before audio starts anyway.

export class SpeedTone {
  private ctx: AudioContext | null = null;
  private gain: GainNode | null = null;
  muted = true;

  enable(): void {
    if (this.ctx === null) {
      this.ctx = new AudioContext();
      const osc = this.ctx.createOscillator();
      osc.type = "triangle";
      osc.frequency.value = 440;
      this.gain = this.ctx.createGain();
      this.gain.gain.value = 0;
      osc.connect(this.gain).connect(this.ctx.destination);
      osc.start();
    }
    this.muted = false;
  }

  mute(): void {
    this.muted = true;
    if (this.gain !== null) this.gain.gain.value = 0;
  }

  setIntensity(value: number): void {
    if (this.muted || this.gain === null) return;
    const v = Math.min(Math.max(value, 0), 1);
    this.gain.gain.value = 0.25 * v;
  }
}
