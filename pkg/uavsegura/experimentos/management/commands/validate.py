from django.core.exceptions import ValidationError
from django.core.management.base import BaseCommand, CommandError

from nucleo.excepciones import DominioError
from experimentos.configuracion import cargar_configuracion
from experimentos.validacion import validate_closed_forms

from .run import errores_de_configuracion


class Command(BaseCommand):
    help = "Contrasta las formas cerradas de COP y SOP con Monte Carlo."

    def add_arguments(self, parser):
        parser.add_argument("config", help="Ruta del TOML o nombre de un preset incluido")
        parser.add_argument("--seed", type=int, help="Reemplaza la semilla maestra")
        parser.add_argument("--trials", type=int, default=100_000, help="Ensayos Monte Carlo por caso")
        parser.add_argument("--escenarios", type=int, default=2, help="Escenarios aleatorios a contrastar")

    def handle(self, *args, **options):
        try:
            config = cargar_configuracion(options["config"])
            if options["seed"] is not None:
                config = config.con(semilla=options["seed"])
            if options["trials"] < 1 or options["escenarios"] < 1:
                raise ValidationError("--trials y --escenarios deben ser al menos 1")
        except (ValidationError, DominioError) as exc:
            raise CommandError(f"Configuracion invalida: {errores_de_configuracion(exc)}", returncode=2)

        reporte = validate_closed_forms(config, ensayos_mc=options["trials"], escenarios=options["escenarios"])
        self.stdout.write(reporte.como_texto())
        if not reporte.aprobado:
            raise CommandError(f"{len(reporte.fallas)} casos no coinciden con Monte Carlo", returncode=1)
