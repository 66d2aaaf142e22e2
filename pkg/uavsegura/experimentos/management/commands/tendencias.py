from django.core.exceptions import ValidationError
from django.core.management.base import BaseCommand, CommandError

from nucleo.ajustes import parametro
from nucleo.excepciones import DominioError
from experimentos.configuracion import cargar_configuracion
from experimentos.tendencias import MONOTONIAS, verificar_tendencias

from .run import errores_de_configuracion


class Command(BaseCommand):
    help = "Verifica las tendencias esperadas del ENST con ensayos emparejados."

    def add_arguments(self, parser):
        parser.add_argument("config", help="Ruta del TOML o nombre de un preset incluido")
        parser.add_argument("--seed", type=int, help="Reemplaza la semilla maestra")
        parser.add_argument("--trials", type=int, help="Reemplaza el numero de ensayos")
        parser.add_argument("--threads", type=int, help="Hilos para repartir los ensayos")
        parser.add_argument(
            "--barridos", nargs="*", choices=sorted(MONOTONIAS),
            help="Barridos de monotonia a correr (sin valores: ninguno)",
        )

    def handle(self, *args, **options):
        try:
            config = cargar_configuracion(options["config"])
            if options["seed"] is not None:
                config = config.con(semilla=options["seed"])
            if options["trials"] is not None:
                if options["trials"] < 2:
                    raise ValidationError("--trials debe ser al menos 2")
                config = config.con(ensayos=options["trials"])
        except (ValidationError, DominioError) as exc:
            raise CommandError(f"Configuracion invalida: {errores_de_configuracion(exc)}", returncode=2)

        hilos = options["threads"] or parametro("HILOS")
        reporte = verificar_tendencias(config, hilos=hilos, barridos=options["barridos"])
        self.stdout.write(reporte.como_texto())
        if not reporte.aprobado:
            raise CommandError(f"{len(reporte.fallas)} tendencias no se cumplen", returncode=1)
